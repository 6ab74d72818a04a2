#pragma once

#include <cstddef>

#include "asymhash/attacker.hpp"

namespace asymhash {

struct OracleLimits {
  std::size_t max_passwords = 10;
  int max_labels = 3;
};

// Exhaustive reference solver: every prefix length 0..n_p (boundaries or not)
// and every tau in {1..m}^length, scored directly from the utility definition.
// Ties within 1e-12 go to fewer instructions, then to the lexicographically
// smaller tau vector. Refuses instances beyond `limits` with InputError.
BestResponse enumerate_optimal(const GameConfig& config, OracleLimits limits = {});

}  // namespace asymhash
