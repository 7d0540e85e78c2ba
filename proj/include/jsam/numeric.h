// Copyright 2026 The JSAM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JSAM_NUMERIC_H_
#define JSAM_NUMERIC_H_

#include <span>

namespace jsam {

// Pairwise (cascade) summation. The result depends only on the input order,
// never on how the caller partitioned the work that produced the values.
double PairwiseSum(std::span<const double> values);

// Standard normal cdf and pdf.
double NormalCdf(double x);
double NormalPdf(double x);

}  // namespace jsam

#endif  // JSAM_NUMERIC_H_
