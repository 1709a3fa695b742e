#pragma once

#include <stdexcept>
#include <string>

#include "wbpdq/harness.hpp"
#include "wbpdq/types.hpp"

namespace wbpdq {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense text format: one "rows cols" header line, then whitespace-separated
/// entries in row order.
Mat read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Mat& m);

/// Vectors are rows x 1 (or 1 x cols) matrices in the same format.
Vec read_vector(const std::string& path);
void write_vector(const std::string& path, const Vec& v);

/// Flat "key = value" experiment config; '#' starts a comment and unknown
/// keys are errors. "inf" is accepted wherever p values appear.
ExperimentConfig parse_experiment_config(const std::string& path);

/// Parse "inf" or a number; used for p values and epsilon flags.
double parse_double_or_inf(const std::string& text);

}  // namespace wbpdq
