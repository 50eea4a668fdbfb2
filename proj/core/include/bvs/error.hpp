#pragma once

#include <stdexcept>
#include <string>

namespace bvs {

// Base for all library errors. The CLI maps the concrete subclasses to
// process exit codes (data = 2, numerical = 3, config = 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unusable input data: missing files, bad outcome column,
// zero-variance columns.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values (prior, chain, CV settings).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Linear-algebra or sampling failures: non-SPD matrices, rank deficiency,
// non-finite likelihoods.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient slab design under the g-prior. Raised by
// build_slab_covariance; the sampler treats it as a rejected proposal.
class RankDeficientError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace bvs
