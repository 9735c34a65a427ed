#include "vndim/turing.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <thread>

#include "vndim/errors.hpp"

namespace vndim {

std::string block_class_str(BlockClass c) {
  switch (c) {
    case BlockClass::Initial: return "I";
    case BlockClass::Accepting: return "A";
    case BlockClass::Rejecting: return "R";
    default: return "work";
  }
}

TuringSystem::TuringSystem(SpaceDescriptor space, int state_factor)
    : space_(std::move(space)), state_factor_(state_factor) {
  space_.validate();
  tuple_count_ = 1;
  strides_.resize(space_.tape_count());
  for (int t = 0; t < space_.tape_count(); ++t) {
    strides_[t] = tuple_count_;
    tuple_count_ *= space_.tapes[t].size();
  }
  table_.assign(tuple_count_ * state_count(), -1);
}

std::uint8_t TuringSystem::state_index(const std::string& name) const {
  return static_cast<std::uint8_t>(space_.factors[state_factor_].index_of(name));
}

std::uint16_t TuringSystem::add_rule(BlockRule rule) {
  rule.inplace_safe = detail::word_inplace_safe(rule.word);
  rules_.push_back(std::move(rule));
  return static_cast<std::uint16_t>(rules_.size() - 1);
}

std::size_t TuringSystem::tuple_index(const std::vector<int>& symbols) const {
  std::size_t idx = 0;
  for (int t = 0; t < space_.tape_count(); ++t) idx += strides_[t] * symbols[t];
  return idx;
}

std::vector<int> TuringSystem::tuple_symbols(std::size_t tuple) const {
  std::vector<int> out(space_.tape_count());
  for (int t = 0; t < space_.tape_count(); ++t) {
    out[t] = static_cast<int>(tuple / strides_[t]) % space_.tapes[t].size();
  }
  return out;
}

std::uint16_t TuringSystem::rule_at(std::uint8_t state, std::size_t tuple) const {
  std::int32_t r = table_[static_cast<std::size_t>(state) * tuple_count_ + tuple];
  if (r < 0) throw config_error("block table has an uncovered (symbols, state) pair");
  return static_cast<std::uint16_t>(r);
}

void TuringSystem::add_row(const std::vector<SymbolSet>& pattern, std::uint8_t state,
                           std::uint16_t rule) {
  if (static_cast<int>(pattern.size()) != space_.tape_count())
    throw config_error("block row pattern arity mismatch");
  rows_.push_back(BlockRow{pattern, state, rule});
  // Expand the product pattern into dense table entries.
  std::vector<int> symbols(space_.tape_count(), 0);
  std::function<void(int)> rec = [&](int t) {
    if (t == space_.tape_count()) {
      auto& slot = table_[static_cast<std::size_t>(state) * tuple_count_ + tuple_index(symbols)];
      if (slot >= 0) throw config_error("block rows overlap at state " +
                                        space_.factors[state_factor_].values[state]);
      slot = rule;
      return;
    }
    for (int s = 0; s < space_.tapes[t].size(); ++s) {
      if (pattern[t] & (SymbolSet{1} << s)) {
        symbols[t] = s;
        rec(t + 1);
      }
    }
  };
  rec(0);
}

void TuringSystem::complete_with_reject() {
  for (int st = 0; st < state_count(); ++st) {
    // One shared fixed-point rule per state.
    std::int32_t reject = -1;
    for (std::size_t tuple = 0; tuple < tuple_count_; ++tuple) {
      auto& slot = table_[static_cast<std::size_t>(st) * tuple_count_ + tuple];
      if (slot >= 0) continue;
      if (reject < 0)
        reject = add_rule(BlockRule{space_.factors[state_factor_].values[st] + "/else", Word{},
                                    static_cast<std::uint8_t>(st), BlockClass::Rejecting});
      slot = reject;
      auto symbols = tuple_symbols(tuple);
      std::vector<SymbolSet> pattern(space_.tape_count());
      for (int t = 0; t < space_.tape_count(); ++t) pattern[t] = SymbolSet{1} << symbols[t];
      rows_.push_back(BlockRow{pattern, static_cast<std::uint8_t>(st),
                               static_cast<std::uint16_t>(reject)});
    }
  }
}

void TuringSystem::validate() const {
  for (const auto& e : table_)
    if (e < 0) throw config_error("block table does not cover all (symbols, state) pairs");
  for (const auto& r : rules_) {
    if (r.cls == BlockClass::Accepting || r.cls == BlockClass::Rejecting) {
      if (!r.word.empty()) throw config_error("accepting/rejecting block with non-empty word: " + r.name);
    }
  }
  for (const auto& row : rows_) {
    const auto& r = rules_[row.rule];
    if ((r.cls == BlockClass::Accepting || r.cls == BlockClass::Rejecting) &&
        r.next_state != row.state)
      throw config_error("accepting/rejecting block changes state: " + r.name);
  }
}

std::vector<SymbolicConfig> TuringSystem::class_region(BlockClass cls) const {
  std::vector<SymbolicConfig> out;
  for (const auto& row : rows_) {
    if (rules_[row.rule].cls != cls) continue;
    SymbolicConfig cfg;
    cfg.cyl = Cylinder::whole_space(space_);
    cfg.heads.assign(space_.tape_count(), 0);
    for (int t = 0; t < space_.tape_count(); ++t) cfg.cyl.cells[t][0] = row.pattern[t];
    cfg.cyl.factor[state_factor_] = row.state;
    out.push_back(std::move(cfg));
  }
  return out;
}

Rational TuringSystem::class_mass(BlockClass cls) const {
  Rational m(0);
  for (const auto& cfg : class_region(cls)) m += cfg.cyl.measure(space_);
  return m;
}

std::vector<Cylinder> TuringSystem::class_cylinders(BlockClass cls) const {
  std::vector<Cylinder> out;
  for (const auto& cfg : class_region(cls)) out.push_back(cfg.cyl);
  return out;
}

namespace {

SymbolSet head_mask(const TuringSystem& sys, const SymbolicConfig& cfg, int tape) {
  const SymbolSet* m = cfg.cyl.cells[tape].find(cfg.heads[tape]);
  return m ? *m : sys.space().tapes[tape].full_mask();
}

// Enumerates rule ids over the product of head masks; returns the rule if
// unique, -1 if mixed.
std::int32_t unique_rule(const TuringSystem& sys, std::uint8_t state,
                         const std::vector<SymbolSet>& masks) {
  const int tc = sys.space().tape_count();
  std::vector<int> symbols(tc, 0);
  std::int32_t found = -1;
  std::function<bool(int)> rec = [&](int t) -> bool {
    if (t == tc) {
      std::int32_t r = sys.rule_at(state, sys.tuple_index(symbols));
      if (found < 0) found = r;
      return found == r;
    }
    for (int s = 0; s < sys.space().tapes[t].size(); ++s) {
      if (masks[t] & (SymbolSet{1} << s)) {
        symbols[t] = s;
        if (!rec(t + 1)) return false;
      }
    }
    return true;
  };
  return rec(0) ? found : -1;
}

struct RefineHint {
  bool on_factor = false;
  int tape = 0;
  Coord coord = 0;
  std::vector<SymbolSet> parts;
};

// For a mixed classification, finds a head cell whose mask splits into rule
// signature groups; the parts partition the mask.
std::optional<RefineHint> classification_hint(const TuringSystem& sys, const SymbolicConfig& cfg,
                                              std::uint8_t state,
                                              const std::vector<SymbolSet>& masks) {
  const int tc = sys.space().tape_count();
  for (int t = 0; t < tc; ++t) {
    if (popcount(masks[t]) < 2) continue;
    // Signature of symbol s: rule ids over the product of the other masks.
    std::map<std::vector<std::int32_t>, SymbolSet> groups;
    for (int s = 0; s < sys.space().tapes[t].size(); ++s) {
      if (!(masks[t] & (SymbolSet{1} << s))) continue;
      std::vector<std::int32_t> sig;
      std::vector<int> symbols(tc, 0);
      symbols[t] = s;
      std::function<void(int)> rec = [&](int u) {
        if (u == tc) {
          sig.push_back(sys.rule_at(state, sys.tuple_index(symbols)));
          return;
        }
        if (u == t) {
          rec(u + 1);
          return;
        }
        for (int v = 0; v < sys.space().tapes[u].size(); ++v)
          if (masks[u] & (SymbolSet{1} << v)) {
            symbols[u] = v;
            rec(u + 1);
          }
      };
      rec(0);
      groups[sig] |= SymbolSet{1} << s;
    }
    if (groups.size() > 1) {
      RefineHint hint;
      hint.tape = t;
      hint.coord = cfg.heads[t];
      for (auto& [sig, mask] : groups) hint.parts.push_back(mask);
      return hint;
    }
  }
  return std::nullopt;
}

}  // namespace

ClassifyResult classify(const TuringSystem& sys, const SymbolicConfig& cfg) {
  const int sf = sys.state_factor();
  if (!cfg.cyl.factor[sf]) return NeedsRefinement{{}, {sf}};
  const std::uint8_t state = *cfg.cyl.factor[sf];
  const int tc = sys.space().tape_count();
  SymbolSet stack_masks[8];
  std::vector<SymbolSet> masks;
  bool all_singleton = true;
  for (int t = 0; t < tc; ++t) {
    SymbolSet m = head_mask(sys, cfg, t);
    if (t < 8) stack_masks[t] = m;
    all_singleton = all_singleton && popcount(m) == 1;
  }
  if (all_singleton && tc <= 8) {
    std::size_t tuple = 0;
    for (int t = 0; t < tc; ++t)
      tuple += sys.stride(t) * static_cast<std::size_t>(__builtin_ctz(stack_masks[t]));
    return Classified{sys.rule_at(state, tuple)};
  }
  masks.resize(tc);
  for (int t = 0; t < tc; ++t) masks[t] = head_mask(sys, cfg, t);
  std::int32_t r = unique_rule(sys, state, masks);
  if (r >= 0) return Classified{static_cast<std::uint16_t>(r)};
  NeedsRefinement need;
  for (int t = 0; t < sys.space().tape_count(); ++t)
    if (popcount(masks[t]) > 1) need.cells.push_back(CellRef{t, cfg.heads[t]});
  return need;
}

StepOutcome step(const TuringSystem& sys, const SymbolicConfig& cfg, Coord window) {
  ClassifyResult cr = classify(sys, cfg);
  if (const auto* need = std::get_if<NeedsRefinement>(&cr)) {
    Branched out;
    if (!need->factors.empty()) {
      const int f = need->factors.front();
      const Rational ratio(1, sys.space().factors[f].size());
      for (auto& child : refine_factor(sys.space(), cfg.cyl, f)) {
        SymbolicConfig c = cfg;
        c.cyl = std::move(child);
        out.children.push_back(std::move(c));
        out.mass_ratios.push_back(ratio);
      }
      return out;
    }
    const std::uint8_t state = *cfg.cyl.factor[sys.state_factor()];
    std::vector<SymbolSet> masks(sys.space().tape_count());
    for (int t = 0; t < sys.space().tape_count(); ++t) masks[t] = head_mask(sys, cfg, t);
    auto hint = classification_hint(sys, cfg, state, masks);
    if (!hint) throw config_error("classification ambiguity without a refining cell");
    const int parent_pop = popcount(masks[hint->tape]);
    for (auto& child :
         refine_cell_partition(sys.space(), cfg.cyl, hint->tape, hint->coord, hint->parts)) {
      SymbolicConfig c;
      c.heads = cfg.heads;
      c.step_count = cfg.step_count;
      c.cyl = std::move(child);
      out.mass_ratios.push_back(
          Rational(popcount(c.cyl.cells[hint->tape].at(hint->coord)), parent_pop));
      out.children.push_back(std::move(c));
    }
    return out;
  }

  const std::uint16_t rule_id = std::get<Classified>(cr).rule;
  const BlockRule& rule = sys.rule(rule_id);
  if (rule.cls == BlockClass::Accepting || rule.cls == BlockClass::Rejecting)
    return Halted{rule.cls, rule_id};

  ApplyResult r = apply_word(sys.space(), cfg, rule.word, window);
  if (const auto* need = std::get_if<NeedsRefinement>(&r)) {
    // A word flip hit a free cell; split it per symbol and retry per child.
    const CellRef cell = need->cells.front();
    Branched out;
    const Rational ratio(1, sys.space().tapes[cell.tape].size());
    for (auto& child : refine(sys.space(), cfg.cyl, cell.tape, cell.coord)) {
      SymbolicConfig c = cfg;
      c.cyl = std::move(child);
      out.children.push_back(std::move(c));
      out.mass_ratios.push_back(ratio);
    }
    return out;
  }
  SymbolicConfig next = std::move(std::get<SymbolicConfig>(r));
  next.step_count = cfg.step_count + 1;
  return Moved{rule_id, std::move(next)};
}

namespace {

// Deterministic by default; VNDIM_THREADS > 1 opts into chunked waves.
// Results are identical either way (exact merge in chunk order).
int thread_budget() {
  if (const char* env = std::getenv("VNDIM_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) return std::min(cap, 64);
  }
  return 1;
}

struct Live {
  SymbolicConfig cfg;
  Rational mass;
  std::vector<std::uint16_t> rule_path;
};

struct WorkerOut {
  std::vector<Live> advanced;
  std::vector<AcceptedChain> accepted;
  Rational accepted_mass;
  Rational rejected_mass;
  std::vector<SymbolicConfig> unresolved;
  Rational unresolved_mass;
};

AcceptedChain recover_chain(const TuringSystem& sys, const Live& item, Coord window) {
  Word full;
  for (std::uint16_t id : item.rule_path)
    for (const auto& a : sys.rule(id).word) full.push_back(a);
  SymbolicConfig initial = item.cfg;
  initial.step_count = 0;
  {
    ApplyResult r = apply_word(sys.space(), initial, inverse_word(full), window);
    initial = std::get<SymbolicConfig>(r);
    initial.step_count = 0;
  }
  AcceptedChain chain;
  chain.initial = initial;
  chain.chain.push_back(initial);
  SymbolicConfig cur = initial;
  std::uint64_t steps = 0;
  for (std::uint16_t id : item.rule_path) {
    ApplyResult r = apply_word(sys.space(), cur, sys.rule(id).word, window);
    cur = std::get<SymbolicConfig>(r);
    cur.step_count = ++steps;
    chain.chain.push_back(cur);
  }
  chain.final = cur;
  return chain;
}

// Classify-only pass for configurations at the depth horizon: a block in
// A or R is a fixed point, so reaching it within `depth` moves decides the
// outcome even though no further move is taken.
void finalize_item(const TuringSystem& sys, Live item, const ExploreOptions& opt, WorkerOut& out) {
  std::vector<Live> stack;
  stack.push_back(std::move(item));
  while (!stack.empty()) {
    Live cur = std::move(stack.back());
    stack.pop_back();
    const Rational mass = cur.mass;
    ClassifyResult cr;
    try {
      cr = classify(sys, cur.cfg);
    } catch (const window_exceeded&) {
      out.unresolved_mass += mass;
      out.unresolved.push_back(std::move(cur.cfg));
      continue;
    }
    if (std::holds_alternative<NeedsRefinement>(cr)) {
      StepOutcome so = step(sys, cur.cfg, opt.window);
      if (auto* br = std::get_if<Branched>(&so)) {
        for (std::size_t i = 0; i < br->children.size(); ++i)
          stack.push_back(Live{std::move(br->children[i]), mass * br->mass_ratios[i], cur.rule_path});
        continue;
      }
      out.unresolved_mass += mass;
      if (opt.keep_unresolved) out.unresolved.push_back(std::move(cur.cfg));
      continue;
    }
    const BlockRule& rule = sys.rule(std::get<Classified>(cr).rule);
    if (rule.cls == BlockClass::Rejecting) {
      out.rejected_mass += mass;
    } else if (rule.cls == BlockClass::Accepting) {
      out.accepted_mass += mass;
      if (opt.keep_chains)
        out.accepted.push_back(recover_chain(sys, cur, opt.window));
      else
        out.accepted.push_back(AcceptedChain{{}, {}, cur.cfg});
    } else {
      out.unresolved_mass += mass;
      out.unresolved.push_back(std::move(cur.cfg));
    }
  }
}

void process_item(const TuringSystem& sys, Live item, const ExploreOptions& opt, WorkerOut& out) {
  std::vector<Live> stack;
  stack.push_back(std::move(item));
  while (!stack.empty()) {
    Live cur = std::move(stack.back());
    stack.pop_back();
    const Rational& mass = cur.mass;
    if (opt.mass_floor.sign() > 0 && mass < opt.mass_floor) {
      out.unresolved_mass += mass;
      if (opt.keep_unresolved) out.unresolved.push_back(std::move(cur.cfg));
      continue;
    }
    ClassifyResult cr = classify(sys, cur.cfg);
    if (std::holds_alternative<NeedsRefinement>(cr)) {
      StepOutcome so;
      try {
        so = step(sys, cur.cfg, opt.window);
      } catch (const window_exceeded&) {
        out.unresolved_mass += mass;
        if (opt.keep_unresolved) out.unresolved.push_back(std::move(cur.cfg));
        continue;
      }
      auto& br = std::get<Branched>(so);
      for (std::size_t i = 0; i < br.children.size(); ++i)
        stack.push_back(Live{std::move(br.children[i]), mass * br.mass_ratios[i], cur.rule_path});
      continue;
    }
    const std::uint16_t rule_id = std::get<Classified>(cr).rule;
    const BlockRule& rule = sys.rule(rule_id);
    if (rule.cls == BlockClass::Accepting || rule.cls == BlockClass::Rejecting) {
      if (rule.cls == BlockClass::Rejecting) {
        out.rejected_mass += mass;
      } else {
        out.accepted_mass += mass;
        if (opt.keep_chains)
          out.accepted.push_back(recover_chain(sys, cur, opt.window));
        else
          out.accepted.push_back(AcceptedChain{{}, {}, std::move(cur.cfg)});
      }
      continue;
    }
    try {
      if (rule.inplace_safe) {
        auto need = detail::apply_word_inplace(cur.cfg, rule.word, opt.window);
        if (need) throw config_error("inplace-safe word needed refinement");
        cur.cfg.step_count += 1;
        if (opt.keep_chains) cur.rule_path.push_back(rule_id);
        out.advanced.push_back(std::move(cur));
        continue;
      }
      ApplyResult r = apply_word(sys.space(), cur.cfg, rule.word, opt.window);
      if (const auto* need = std::get_if<NeedsRefinement>(&r)) {
        const CellRef cell = need->cells.front();
        const Rational ratio(1, sys.space().tapes[cell.tape].size());
        for (auto& child : refine(sys.space(), cur.cfg.cyl, cell.tape, cell.coord)) {
          SymbolicConfig c = cur.cfg;
          c.cyl = std::move(child);
          stack.push_back(Live{std::move(c), mass * ratio, cur.rule_path});
        }
        continue;
      }
      SymbolicConfig next = std::move(std::get<SymbolicConfig>(r));
      next.step_count = cur.cfg.step_count + 1;
      if (opt.keep_chains) cur.rule_path.push_back(rule_id);
      out.advanced.push_back(Live{std::move(next), std::move(cur.mass), std::move(cur.rule_path)});
    } catch (const window_exceeded&) {
      out.unresolved_mass += mass;
      if (opt.keep_unresolved) out.unresolved.push_back(std::move(cur.cfg));
    }
  }
}

}  // namespace

ExplorationResult explore(const TuringSystem& sys, const std::vector<SymbolicConfig>& start,
                          const ExploreOptions& opt) {
  ExplorationResult res;
  res.depth = opt.depth;
  std::vector<Live> wave;
  for (const auto& cfg : start) {
    Rational mass = cfg.cyl.measure(sys.space());
    res.start_mass += mass;
    SymbolicConfig c = cfg;
    c.step_count = 0;
    wave.push_back(Live{std::move(c), std::move(mass), {}});
  }

  const int threads = thread_budget();
  for (std::uint64_t s = 0; s < opt.depth && !wave.empty(); ++s) {
    std::vector<WorkerOut> outs;
    if (threads <= 1 || wave.size() < 64) {
      outs.resize(1);
      for (auto& item : wave) process_item(sys, std::move(item), opt, outs[0]);
    } else {
      const int n = std::min<std::size_t>(threads, wave.size());
      outs.resize(n);
      std::vector<std::thread> pool;
      const std::size_t chunk = (wave.size() + n - 1) / n;
      for (int w = 0; w < n; ++w) {
        pool.emplace_back([&, w]() {
          const std::size_t lo = w * chunk;
          const std::size_t hi = std::min(wave.size(), lo + chunk);
          for (std::size_t i = lo; i < hi; ++i) process_item(sys, std::move(wave[i]), opt, outs[w]);
        });
      }
      for (auto& t : pool) t.join();
    }
    wave.clear();
    for (auto& o : outs) {
      for (auto& a : o.advanced) wave.push_back(std::move(a));
      for (auto& c : o.accepted) res.accepted.push_back(std::move(c));
      res.accepted_mass += o.accepted_mass;
      res.rejected_mass += o.rejected_mass;
      res.unresolved_mass += o.unresolved_mass;
      for (auto& u : o.unresolved) res.unresolved.push_back(std::move(u));
    }
  }
  // Configurations at the depth horizon: halted blocks are fixed points and
  // count as decided; everything else is unresolved.
  {
    WorkerOut out;
    for (auto& item : wave) finalize_item(sys, std::move(item), opt, out);
    for (auto& c : out.accepted) res.accepted.push_back(std::move(c));
    res.accepted_mass += out.accepted_mass;
    res.rejected_mass += out.rejected_mass;
    res.unresolved_mass += out.unresolved_mass;
    for (auto& u : out.unresolved) res.unresolved.push_back(std::move(u));
  }
  return res;
}

ExplorationResult explore_initial(const TuringSystem& sys, const ExploreOptions& opt) {
  return explore(sys, sys.class_region(BlockClass::Initial), opt);
}

Verdict check_no_restart(const TuringSystem& sys) {
  const auto initial = sys.class_cylinders(BlockClass::Initial);
  for (const auto& row : sys.rows()) {
    const BlockRule& rule = sys.rule(row.rule);
    SymbolicConfig cfg;
    cfg.cyl = Cylinder::whole_space(sys.space());
    cfg.heads.assign(sys.space().tape_count(), 0);
    for (int t = 0; t < sys.space().tape_count(); ++t) cfg.cyl.cells[t][0] = row.pattern[t];
    cfg.cyl.factor[sys.state_factor()] = row.state;

    // Words of well-formed systems are determined on their block; if a flip
    // lands on a free cell, split per symbol and retry.
    std::vector<SymbolicConfig> pending{cfg};
    while (!pending.empty()) {
      SymbolicConfig cur = std::move(pending.back());
      pending.pop_back();
      ApplyResult r = apply_word(sys.space(), cur, rule.word);
      if (const auto* need = std::get_if<NeedsRefinement>(&r)) {
        const CellRef cell = need->cells.front();
        for (auto& child : refine(sys.space(), cur.cyl, cell.tape, cell.coord)) {
          SymbolicConfig c = cur;
          c.cyl = std::move(child);
          pending.push_back(std::move(c));
        }
        continue;
      }
      const Cylinder image = std::get<SymbolicConfig>(r).point_view();
      for (const auto& ib : initial) {
        if (auto overlap = image.intersect(ib)) {
          return Verdict{false, "block " + rule.name + " maps into the initial set; witness: " +
                                    overlap->str(sys.space())};
        }
      }
    }
  }
  return Verdict{true, "no block image meets the initial set"};
}

Verdict check_disjoint_chains(const ExplorationResult& result) {
  for (std::size_t i = 0; i < result.accepted.size(); ++i) {
    const Cylinder a = result.accepted[i].final.point_view();
    for (std::size_t j = i + 1; j < result.accepted.size(); ++j) {
      const Cylinder b = result.accepted[j].final.point_view();
      if (!a.disjoint_from(b))
        return Verdict{false, "accepted chains " + std::to_string(i) + " and " + std::to_string(j) +
                                  " share their final cylinder"};
    }
  }
  return Verdict{true,
                 "all " + std::to_string(result.accepted.size()) + " final cylinders pairwise disjoint"};
}

Interval omega1_bounds(const TuringSystem& sys, std::uint64_t depth, Coord window) {
  Verdict nr = check_no_restart(sys);
  if (!nr.pass) throw restart_detected(nr.detail);
  ExploreOptions opt;
  opt.depth = depth;
  opt.window = window;
  opt.keep_chains = false;
  opt.keep_unresolved = false;
  ExplorationResult res = explore_initial(sys, opt);
  return Interval{res.accepted_mass, res.accepted_mass + res.unresolved_mass};
}

Rational stopping_mass(const TuringSystem& sys, std::uint64_t depth, Coord window) {
  ExploreOptions opt;
  opt.depth = depth;
  opt.window = window;
  opt.keep_chains = false;
  opt.keep_unresolved = false;
  std::vector<SymbolicConfig> start;
  for (int st = 0; st < sys.state_count(); ++st) {
    SymbolicConfig cfg = SymbolicConfig::start(sys.space());
    cfg.cyl.factor[sys.state_factor()] = static_cast<std::uint8_t>(st);
    start.push_back(std::move(cfg));
  }
  ExplorationResult res = explore(sys, start, opt);
  return res.unresolved_mass;
}

std::optional<std::uint64_t> steps_to_halt(const TuringSystem& sys, const SymbolicConfig& cfg,
                                           std::uint64_t max_steps, Coord window) {
  SymbolicConfig cur = cfg;
  cur.step_count = 0;
  for (std::uint64_t s = 0; s <= max_steps; ++s) {
    StepOutcome so = step(sys, cur, window);
    if (std::holds_alternative<Halted>(so)) return cur.step_count;
    if (auto* moved = std::get_if<Moved>(&so)) {
      cur = std::move(moved->next);
      continue;
    }
    return std::nullopt;  // branch required: seed was not fully determined
  }
  return std::nullopt;
}

Verdict validate_fundamental_set(const TuringSystem& sys, const std::vector<CylinderFamily>& expected,
                                 long k_max, Coord window) {
  // Probe each expected member: it must halt in A, and its halt time sets the
  // exploration depth.
  std::uint64_t depth = 1;
  std::vector<Cylinder> members;
  for (const auto& fam : expected) {
    for (long k = 1; k <= k_max; ++k) {
      auto m = fam.member(k);
      if (!m) continue;
      SymbolicConfig seed;
      seed.cyl = *m;
      seed.heads.assign(sys.space().tape_count(), 0);
      auto steps = steps_to_halt(sys, seed, 64 + 40 * static_cast<std::uint64_t>(k) * k, window);
      if (!steps)
        return Verdict{false, fam.name + " member k=" + std::to_string(k) + " does not halt"};
      depth = std::max(depth, *steps);
      members.push_back(*m);
    }
  }

  ExploreOptions opt;
  opt.depth = depth;
  opt.window = window;
  opt.keep_chains = true;
  ExplorationResult res = explore_initial(sys, opt);

  std::vector<Cylinder> got;
  for (const auto& chain : res.accepted) got.push_back(chain.initial.point_view());

  for (const auto& m : members) {
    if (std::find(got.begin(), got.end(), m) == got.end())
      return Verdict{false, "missing fundamental cylinder: " + m.str(sys.space())};
  }
  for (const auto& g : got) {
    if (std::find(members.begin(), members.end(), g) == members.end())
      return Verdict{false, "unexpected accepted cylinder: " + g.str(sys.space())};
  }
  return Verdict{true, "fundamental set matches, " + std::to_string(got.size()) +
                           " cylinders at depth " + std::to_string(depth)};
}

// ---------------------------------------------------------------------------
// Builtin systems

namespace {

Perm swap_last_two_bits_perm() {
  // (a,b,c) -> (a,c,b) on three-bit symbols indexed a*4+b*2+c.
  Perm p(8);
  for (int i = 0; i < 8; ++i) {
    const int a = (i >> 2) & 1, b = (i >> 1) & 1, c = i & 1;
    p[i] = static_cast<std::uint8_t>(a * 4 + c * 2 + b);
  }
  return p;
}

constexpr SymbolSet bit(int i) { return SymbolSet{1} << i; }

}  // namespace

TuringSystem build_system_x(const OraclePtr& oracle) {
  SpaceDescriptor sp;
  sp.tapes = {Alphabet{"m", {"000", "001", "010", "011", "100", "101", "110", "111"}}};
  sp.factors = {Factor{"state",
                       {"Start", "SearchFwd1", "SearchBack", "SearchFwdEither", "Dummy1", "Dummy2",
                        "Dummy3", "Dummy4"}}};
  TuringSystem sys(sp, 0);

  const Perm beta = swap_last_two_bits_perm();
  SymbolSet fixed = 0;
  for (int i = 0; i < 8; ++i)
    if (beta[i] == i) fixed |= bit(i);  // {000, 011, 100, 111}
  const SymbolSet mark = bit(2);        // "010"

  const std::uint8_t kStart = sys.state_index("Start");
  const std::uint8_t kFwd1 = sys.state_index("SearchFwd1");
  const std::uint8_t kBack = sys.state_index("SearchBack");
  const std::uint8_t kFwdE = sys.state_index("SearchFwdEither");

  sys.add_row({mark}, kStart,
              sys.add_rule({"Start/010",
                            {Shift{0, +1}, FactorMove{0, kStart, kFwd1}},
                            kFwd1,
                            BlockClass::Initial}));
  sys.add_row({fixed}, kFwd1,
              sys.add_rule({"SearchFwd1/fixed", {Shift{0, +1}}, kFwd1, BlockClass::Work}));
  sys.add_row({mark}, kFwd1,
              sys.add_rule({"SearchFwd1/010",
                            {HeadPerm{0, beta}, Shift{0, -1}, FactorMove{0, kFwd1, kBack}},
                            kBack,
                            BlockClass::Work}));
  sys.add_row({fixed}, kBack,
              sys.add_rule({"SearchBack/fixed", {Shift{0, -1}}, kBack, BlockClass::Work}));
  sys.add_row({mark}, kBack,
              sys.add_rule({"SearchBack/010",
                            {OracleFlip{0, beta, oracle}, Shift{0, +1}, FactorMove{0, kBack, kFwdE}},
                            kFwdE,
                            BlockClass::Work}));
  sys.add_row({fixed}, kFwdE,
              sys.add_rule({"SearchFwdEither/fixed", {Shift{0, +1}}, kFwdE, BlockClass::Work}));
  sys.add_row({mark}, kFwdE,
              sys.add_rule({"SearchFwdEither/010", {}, kFwdE, BlockClass::Accepting}));
  sys.complete_with_reject();
  sys.validate();
  return sys;
}

TuringSystem build_system_y() {
  // Sweep architecture: the Check phase pins aligned runs 1 0^k 1 on tapes 1
  // and 2 with a 1 under the tape-3 head. Tape 1 is then swept k+2 times,
  // advancing tape 3 by k cells per forward sweep. Tape 2's head steps back
  // once per turnaround and acts as the sweep counter: it reads 1 exactly on
  // the first sweep (cell k+1) and the last (cell 0). The accept state is
  // reachable only from the final turnaround read (1,1,1), which holds iff
  // tape 3 carries exactly 1 + (k+2)k = k^2+2k+1 cells before its closing 1.
  SpaceDescriptor sp;
  sp.tapes = {Alphabet{"t1", {"0", "1"}}, Alphabet{"t2", {"0", "1"}}, Alphabet{"t3", {"0", "1"}}};
  sp.factors = {Factor{"state",
                       {"Start", "Check", "BackSeed", "FwdSeed", "Back", "Fwd", "FinalBack",
                        "Dummy"}}};
  TuringSystem sys(sp, 0);

  const SymbolSet b0 = bit(0), b1 = bit(1);
  const std::uint8_t kStart = sys.state_index("Start");
  const std::uint8_t kCheck = sys.state_index("Check");
  const std::uint8_t kBackSeed = sys.state_index("BackSeed");
  const std::uint8_t kFwdSeed = sys.state_index("FwdSeed");
  const std::uint8_t kBack = sys.state_index("Back");
  const std::uint8_t kFwd = sys.state_index("Fwd");
  const std::uint8_t kFinal = sys.state_index("FinalBack");

  sys.add_row({b1, b1, b1}, kStart,
              sys.add_rule({"Start/111",
                            {Shift{0, +1}, Shift{1, +1}, FactorMove{0, kStart, kCheck}},
                            kCheck,
                            BlockClass::Initial}));
  sys.add_row({b0, b0, b1}, kCheck,
              sys.add_rule({"Check/001", {Shift{0, +1}, Shift{1, +1}}, kCheck, BlockClass::Work}));
  sys.add_row({b1, b1, b1}, kCheck,
              sys.add_rule({"Check/111",
                            {Shift{0, -1}, Shift{2, +1}, FactorMove{0, kCheck, kBackSeed}},
                            kBackSeed,
                            BlockClass::Work}));
  // First backward sweep: tape 2 still on its terminal 1; an early 1 under
  // the tape-3 head must reject, which is why this sweep has its own state.
  sys.add_row({b0, b1, b0}, kBackSeed,
              sys.add_rule({"BackSeed/010", {Shift{0, -1}}, kBackSeed, BlockClass::Work}));
  sys.add_row({b1, b1, b0}, kBackSeed,
              sys.add_rule({"BackSeed/110",
                            {Shift{0, +1}, FactorMove{0, kBackSeed, kFwdSeed}},
                            kFwdSeed,
                            BlockClass::Work}));
  // First forward sweep; its turnaround starts the counted middle sweeps.
  sys.add_row({b0, b1, b0}, kFwdSeed,
              sys.add_rule({"FwdSeed/010", {Shift{0, +1}, Shift{2, +1}}, kFwdSeed, BlockClass::Work}));
  sys.add_row({b1, b1, b0}, kFwdSeed,
              sys.add_rule({"FwdSeed/110",
                            {Shift{0, -1}, Shift{1, -1}, FactorMove{0, kFwdSeed, kBack}},
                            kBack,
                            BlockClass::Work}));
  // Middle sweeps (tape 2 head on a 0) and the last sweep (tape 2 head on
  // its leading 1).
  sys.add_row({b0, b0, b0}, kBack,
              sys.add_rule({"Back/000", {Shift{0, -1}}, kBack, BlockClass::Work}));
  sys.add_row({b1, b0, b0}, kBack,
              sys.add_rule({"Back/100", {Shift{0, +1}, FactorMove{0, kBack, kFwd}}, kFwd,
                            BlockClass::Work}));
  sys.add_row({b0, b1, b0}, kBack,
              sys.add_rule({"Back/010", {Shift{0, -1}}, kBack, BlockClass::Work}));
  sys.add_row({b1, b1, b0}, kBack,
              sys.add_rule({"Back/110", {Shift{0, +1}, FactorMove{0, kBack, kFwd}}, kFwd,
                            BlockClass::Work}));
  sys.add_row({b0, b0, b0}, kFwd,
              sys.add_rule({"Fwd/000", {Shift{0, +1}, Shift{2, +1}}, kFwd, BlockClass::Work}));
  sys.add_row({b0, b1, b0}, kFwd,
              sys.add_rule({"Fwd/010", {Shift{0, +1}, Shift{2, +1}}, kFwd, BlockClass::Work}));
  sys.add_row({b1, b0, b0}, kFwd,
              sys.add_rule({"Fwd/100",
                            {Shift{0, -1}, Shift{1, -1}, FactorMove{0, kFwd, kBack}},
                            kBack,
                            BlockClass::Work}));
  // Final turnaround: tape 1 on its closing 1, tape 2 back on its leading 1,
  // tape 3 on a 1 exactly when the third run has length k^2+2k.
  sys.add_row({b1, b1, b1}, kFwd,
              sys.add_rule({"Fwd/111",
                            {Shift{0, -1}, FactorMove{0, kFwd, kFinal}},
                            kFinal,
                            BlockClass::Work}));
  sys.add_row({b0, b1, b1}, kFinal,
              sys.add_rule({"FinalBack/011", {}, kFinal, BlockClass::Accepting}));
  sys.complete_with_reject();
  sys.validate();
  return sys;
}

CylinderFamily fundamental_family_x(const OraclePtr& oracle) {
  CylinderFamily fam;
  fam.name = "runs over the flip-fixed symbols";
  const Perm beta = swap_last_two_bits_perm();
  SymbolSet fixed = 0;
  for (int i = 0; i < 8; ++i)
    if (beta[i] == i) fixed |= bit(i);
  const SymbolSet mark = bit(2);
  fam.member = [oracle, fixed, mark](long k) -> std::optional<Cylinder> {
    if (k < 1 || !oracle->contains(k)) return std::nullopt;
    Cylinder c;
    c.cells.resize(1);
    c.factor.resize(1);
    c.cells[0][0] = mark;
    for (long i = 1; i < k; ++i) c.cells[0][i] = fixed;
    c.cells[0][k] = mark;
    c.factor[0] = 0;  // Start
    return c;
  };
  return fam;
}

CylinderFamily fundamental_family_y() {
  CylinderFamily fam;
  fam.name = "paired runs k / k^2+2k";
  fam.member = [](long k) -> std::optional<Cylinder> {
    if (k < 1) return std::nullopt;
    Cylinder c;
    c.cells.resize(3);
    c.factor.resize(1);
    const SymbolSet zero = bit(0), one = bit(1);
    for (int t : {0, 1}) {
      c.cells[t][0] = one;
      for (long i = 1; i <= k; ++i) c.cells[t][i] = zero;
      c.cells[t][k + 1] = one;
    }
    c.cells[2][0] = one;
    const long run = k * k + 2 * k;
    for (long i = 1; i <= run; ++i) c.cells[2][i] = zero;
    c.cells[2][run + 1] = one;
    c.factor[0] = 0;  // Start
    return c;
  };
  return fam;
}

std::uint64_t chain_length_x(long k) { return static_cast<std::uint64_t>(3 * k + 1); }

}  // namespace vndim
