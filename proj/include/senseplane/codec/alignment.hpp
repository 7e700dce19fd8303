// Copyright 2026 The Senseplane Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "senseplane/matrix.hpp"

namespace senseplane::codec {

struct AlignmentBatch {
  RowMatrix pooled;  // B x d sensor vectors h_i
  RowMatrix text;    // B x d text vectors t_i
  double temperature = 0.07;
};

// Contrastive alignment loss
//   -(1/B) sum_i log( exp(<h_i,t_i>/tau) / sum_j exp(<h_i,t_j>/tau) )
// evaluated with max-subtraction so it only fails on non-finite inputs.
double alignment_loss(const AlignmentBatch& batch);

}  // namespace senseplane::codec
