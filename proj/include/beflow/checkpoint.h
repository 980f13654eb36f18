//
// Project beflow - Copyright 2026 The beflow Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef BEFLOW_CHECKPOINT_H_
#define BEFLOW_CHECKPOINT_H_

#include <stdexcept>
#include <string>

#include "beflow/model.h"

namespace beflow {

class CheckpointError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/**
 * Binary layout (host byte order):
 *
 *   "BEFLOWCK"                 8-byte magic
 *   u32 version                currently 1
 *   u32 n, n bytes             key=value lines: model and flow config,
 *                              feature_dim (reals as hex floats)
 *   u32 count                  tensor table entries
 *     u32 len, len bytes name; i32 rows; i32 cols
 *   u64 total                  parameter count
 *   total x f64                parameters in table order
 */
void save_checkpoint(const std::string &path, const VectorFieldModel &model);

VectorFieldModel load_checkpoint(const std::string &path);

// Also rejects a checkpoint whose architecture differs from expected.
VectorFieldModel load_checkpoint(const std::string &path,
                                 const ModelConfig &expected,
                                 int expected_feature_dim);

}  // namespace beflow

#endif  // BEFLOW_CHECKPOINT_H_
