#pragma once

#include "tnkit/tensor_train.hpp"

#include <string>

namespace tnkit {

// Binary container: magic "TNKT", u32 version, u32 kind (0 train,
// 1 operator), u64 core count, i64 center (-1 if unset), then per core a u32
// rank, u64 extents and interleaved (re, im) doubles, all little-endian.
// A JSON sidecar `<path>.json` records the site count, physical extents,
// bond extents and center. Both files are written atomically.
void save_train(const TensorTrain& tt, const std::string& path);
TensorTrain load_train(const std::string& path);
void save_operator(const TensorTrainOperator& op, const std::string& path);
TensorTrainOperator load_operator(const std::string& path);

std::string train_metadata_json(const TensorTrain& tt);

// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace tnkit
