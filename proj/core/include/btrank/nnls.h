// Copyright 2026 The btrank Authors.
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

#ifndef BTRANK_NNLS_H_
#define BTRANK_NNLS_H_

#include <Eigen/Core>

namespace btrank {

// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
// Inactive coordinates of the result are exactly zero.
Eigen::VectorXd NonNegativeLeastSquares(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& b);

// Same active-set method for min 0.5 x'Hx - g'x subject to x >= 0, with H
// symmetric positive semidefinite.
Eigen::VectorXd NonNegativeQuadratic(const Eigen::MatrixXd& h,
                                     const Eigen::VectorXd& g);

}  // namespace btrank

#endif  // BTRANK_NNLS_H_
