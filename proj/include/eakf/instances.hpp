#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "eakf/ensemble.hpp"

namespace eakf::harness {

enum class InstanceKind {
  generic,         // dense normal H
  rank_deficient,  // m - 1 < n
  partial_obs,     // coordinate-selection H with p < rank Z^f
  zero_h,          // H = 0
  zero_ensemble,   // identical members, Z^f = 0 exactly
};

std::string to_string(InstanceKind kind);

struct IntRange {
  int lo = 1;
  int hi = 1;
  bool valid() const { return lo <= hi; }
};

struct InstanceRanges {
  IntRange n{1, 20};
  IntRange m{2, 12};
  IntRange p{1, 20};  // additionally capped at n
};

struct Instance {
  ForecastEnsemble ensemble;
  ObservationModel obs;
  InstanceKind kind;
};

using Rng = std::mt19937_64;

/// Random instance of the requested kind. Members are standard normal, R is
/// either diagonal or D + L L^T with condition number <= 1e4, y is drawn around
/// H mu^f. When the ranges cannot realize `kind` (e.g. no n > m - 1 fits),
/// a generic instance is returned and `kind` reports that.
Instance make_instance(InstanceKind kind, const InstanceRanges& ranges, Rng& rng);

/// n = 1, m = 2: members [1, -1], H = [1], R = [2], y = [1].
Instance scalar_instance();

}  // namespace eakf::harness
