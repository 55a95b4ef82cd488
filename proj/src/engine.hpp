/* Copyright 2026 The RING Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Batched forward and reverse passes of one RING step. Columns are graph
// nodes; several disjoint graphs may share one batch.

#pragma once

#include <Eigen/Core>
#include <vector>

#include "ring/kinematics.hpp"
#include "ring/net.hpp"

namespace ring::detail {

struct Topology {
  std::size_t cols = 0;
  std::vector<int> parent;          // column of the parent, -1 for earth
  std::vector<int> child_offsets;   // CSR into children, size cols + 1
  std::vector<int> children;

  static Topology from_graphs(const std::vector<const ParentArray*>& graphs);
  static Topology replicate(const ParentArray& lambda, std::size_t copies);
};

struct GruCache {
  Eigen::MatrixXd r, z, n, rh;
};

struct NormCache {
  Eigen::MatrixXd xhat;
  Eigen::RowVectorXd inv_std;
  Eigen::MatrixXd out;
};

struct StepCache {
  Eigen::MatrixXd msg_hidden;  // H x K
  Eigen::MatrixXd msg;         // M x K
  Eigen::MatrixXd input;       // (2M + 10) x K
  GruCache gru1;
  NormCache norm1;
  GruCache gru2;
  NormCache norm2;
  Eigen::MatrixXd head_hidden;  // H x K
  Eigen::MatrixXd raw;          // 4 x K
  Eigen::RowVectorXd raw_norm;
  Eigen::MatrixXd out;          // 4 x K, unit columns
};

struct GruGrad {
  MatrixMap wx, wh, b;
};

void gru_forward(const GruView& w, const Eigen::MatrixXd& h, const Eigen::MatrixXd& x, GruCache& c,
                 Eigen::MatrixXd& out);

// dout: gradient wrt the new state. Writes dh (wrt previous state) and dx;
// accumulates weight gradients when grad is non-null.
void gru_backward(const GruView& w, const Eigen::MatrixXd& h, const Eigen::MatrixXd& x,
                  const GruCache& c, const Eigen::MatrixXd& dout, Eigen::MatrixXd& dh,
                  Eigen::MatrixXd& dx, GruGrad* grad);

void norm_forward(const Eigen::MatrixXd& x, ConstMatrixMap gain, ConstMatrixMap offset, NormCache& c);
void norm_backward(const NormCache& c, ConstMatrixMap gain, const Eigen::MatrixXd& dy,
                   Eigen::MatrixXd& dx, MatrixMap* dgain, MatrixMap* doffset);

// x: 10 x K. Writes the new state into s1/s2 and the unit outputs into c.out.
void forward_step(const RingParams& p, const Topology& topo, const Eigen::MatrixXd& s1_prev,
                  const Eigen::MatrixXd& s2_prev, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  StepCache& c, Eigen::MatrixXd& s1, Eigen::MatrixXd& s2);

// On entry ds1/ds2 hold dL/d(new state) from later steps; on exit they hold
// dL/d(previous state). dout is dL/d(unit outputs) of this step.
void backward_step(const RingParams& p, const Topology& topo, const Eigen::MatrixXd& s1_prev,
                   const Eigen::MatrixXd& s2_prev, const StepCache& c, const Eigen::MatrixXd& dout,
                   Eigen::MatrixXd& ds1, Eigen::MatrixXd& ds2, RingParams& grad);

}  // namespace ring::detail
