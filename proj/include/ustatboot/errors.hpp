#pragma once

#include <stdexcept>
#include <string>

namespace ustatboot {

/// A request would materialize more memory or work than the configured
/// budget allows (e.g. a dense d x d matrix past the dimension limit).
class resource_limit_error : public std::runtime_error {
public:
  explicit resource_limit_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// A numerical procedure failed to produce a usable result
/// (non-convergent iteration, factorization breakdown).
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// The input sample is degenerate for the requested statistic
/// (all projection variances vanish).
class degeneracy_error : public numerical_error {
public:
  explicit degeneracy_error(const std::string& what) : numerical_error(what) {}
};

}  // namespace ustatboot
