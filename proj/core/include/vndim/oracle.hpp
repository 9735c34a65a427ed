#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>

namespace vndim {

/// Membership oracle for a set Sigma of positive integers: a total predicate
/// plus an increasing enumerator. Coordinates <= 0 are never members.
class SigmaOracle {
 public:
  virtual ~SigmaOracle() = default;
  virtual bool contains(std::int64_t n) const = 0;
  /// Smallest member strictly greater than n, or -1 if none/unknown bound.
  virtual std::int64_t next_after(std::int64_t n) const = 0;
  virtual std::string name() const = 0;
};

using OraclePtr = std::shared_ptr<const SigmaOracle>;

OraclePtr oracle_empty();
OraclePtr oracle_all();
OraclePtr oracle_evens();
OraclePtr oracle_primes();
OraclePtr oracle_list(std::set<std::int64_t> members);
OraclePtr oracle_from_file(const std::string& path);

/// Parses "empty" | "all" | "evens" | "primes" | "list:1,2,3" | "file:path".
OraclePtr parse_oracle_spec(const std::string& spec);

}  // namespace vndim
