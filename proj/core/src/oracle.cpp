#include "vndim/oracle.hpp"

#include <fstream>
#include <sstream>

#include "vndim/errors.hpp"

namespace vndim {

namespace {

struct EmptyOracle final : SigmaOracle {
  bool contains(std::int64_t) const override { return false; }
  std::int64_t next_after(std::int64_t) const override { return -1; }
  std::string name() const override { return "empty"; }
};

struct AllOracle final : SigmaOracle {
  bool contains(std::int64_t n) const override { return n >= 1; }
  std::int64_t next_after(std::int64_t n) const override { return n < 1 ? 1 : n + 1; }
  std::string name() const override { return "all"; }
};

struct EvensOracle final : SigmaOracle {
  bool contains(std::int64_t n) const override { return n >= 2 && n % 2 == 0; }
  std::int64_t next_after(std::int64_t n) const override { return n < 2 ? 2 : n + 2 - (n % 2); }
  std::string name() const override { return "evens"; }
};

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct PrimesOracle final : SigmaOracle {
  bool contains(std::int64_t n) const override { return is_prime(n); }
  std::int64_t next_after(std::int64_t n) const override {
    std::int64_t m = n < 2 ? 2 : n + 1;
    while (!is_prime(m)) ++m;
    return m;
  }
  std::string name() const override { return "primes"; }
};

struct ListOracle final : SigmaOracle {
  std::set<std::int64_t> members;
  explicit ListOracle(std::set<std::int64_t> m) : members(std::move(m)) {}
  bool contains(std::int64_t n) const override { return n >= 1 && members.count(n) > 0; }
  std::int64_t next_after(std::int64_t n) const override {
    auto it = members.upper_bound(n);
    return it == members.end() ? -1 : *it;
  }
  std::string name() const override {
    std::ostringstream out;
    out << "list:";
    bool first = true;
    for (auto m : members) {
      if (!first) out << ',';
      out << m;
      first = false;
    }
    return out.str();
  }
};

}  // namespace

OraclePtr oracle_empty() { return std::make_shared<EmptyOracle>(); }
OraclePtr oracle_all() { return std::make_shared<AllOracle>(); }
OraclePtr oracle_evens() { return std::make_shared<EvensOracle>(); }
OraclePtr oracle_primes() { return std::make_shared<PrimesOracle>(); }

OraclePtr oracle_list(std::set<std::int64_t> members) {
  for (auto m : members)
    if (m < 1) throw config_error("oracle list members must be positive");
  return std::make_shared<ListOracle>(std::move(members));
}

OraclePtr oracle_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open oracle file: " + path);
  std::set<std::int64_t> members;
  std::int64_t v;
  while (in >> v) members.insert(v);
  return oracle_list(std::move(members));
}

OraclePtr parse_oracle_spec(const std::string& spec) {
  if (spec == "empty" || spec == "none") return oracle_empty();
  if (spec == "all") return oracle_all();
  if (spec == "evens") return oracle_evens();
  if (spec == "primes") return oracle_primes();
  if (spec.rfind("list:", 0) == 0) {
    std::set<std::int64_t> members;
    std::stringstream ss(spec.substr(5));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      members.insert(std::stoll(tok));
    }
    return oracle_list(std::move(members));
  }
  if (spec.rfind("file:", 0) == 0) return oracle_from_file(spec.substr(5));
  throw config_error("unknown oracle spec: " + spec);
}

}  // namespace vndim
