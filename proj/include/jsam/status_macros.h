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

#ifndef JSAM_STATUS_MACROS_H_
#define JSAM_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define JSAM_STATUS_CONCAT_INNER_(a, b) a##b
#define JSAM_STATUS_CONCAT_(a, b) JSAM_STATUS_CONCAT_INNER_(a, b)

#define JSAM_RETURN_IF_ERROR(expr)               \
  do {                                           \
    ::absl::Status jsam_status_ = (expr);        \
    if (!jsam_status_.ok()) return jsam_status_; \
  } while (false)

#define JSAM_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) return statusor.status();           \
  lhs = *std::move(statusor)

// Usage: JSAM_ASSIGN_OR_RETURN(auto value, MaybeValue());
#define JSAM_ASSIGN_OR_RETURN(lhs, rexpr)                                    \
  JSAM_ASSIGN_OR_RETURN_IMPL_(JSAM_STATUS_CONCAT_(jsam_statusor_, __LINE__), \
                              lhs, rexpr)

#endif  // JSAM_STATUS_MACROS_H_
