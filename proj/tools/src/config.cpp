#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "rdsmb/errors.hpp"

namespace rdsmb::cli {
using rdsmb::to_string;

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

const std::set<std::string, std::less<>> kFixedKeys = {
    "subcommand", "model",      "p",         "base_p",       "group",
    "n_max",      "folner_scale", "trajectories", "samples",   "seed",
    "tolerance",  "check_from", "monte_carlo", "workers",    "output",
    "k_set",      "tempered_bound", "checks",  "invariance_checks", "window",
    "element_bound", "lemma",   "ambient",   "delta",        "epsilon",
    "C",          "alpha",      "check_hypotheses", "retention", "expect",
};

const std::regex kIndexedKey(R"((fiber_p|transition)\.(\d+))");
const std::regex kLevelKey(R"((shape|centers)\.(\d+)(?:\.(\d+))?)");

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto k = s.find(sep);
    out.push_back(trim(s.substr(0, k)));
    if (k == std::string_view::npos) return out;
    s.remove_prefix(k + 1);
  }
}

template <typename T>
std::optional<T> parse_int(std::string_view s) {
  T v{};
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

class Reader {
 public:
  std::map<std::string, Entry, std::less<>> entries;
  std::vector<ConfigError> errors;

  const Entry* find(std::string_view key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }
  bool has(std::string_view key) const { return find(key) != nullptr; }

  void error(std::string_view key, std::string reason) {
    const Entry* e = find(key);
    errors.push_back({std::string(key), e ? e->line : 0, std::move(reason)});
  }
  void missing(std::string_view key, std::string_view why) {
    errors.push_back({std::string(key), 0, "missing required key (" + std::string(why) + ")"});
  }

  template <typename T>
  std::optional<T> integer(std::string_view key, T min_value) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    const auto v = parse_int<T>(e->value);
    if (!v) {
      error(key, "malformed integer '" + e->value + "'");
      return std::nullopt;
    }
    if (*v < min_value) {
      error(key, "must be at least " + std::to_string(min_value));
      return std::nullopt;
    }
    return v;
  }

  std::optional<Rational> rational(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    try {
      return parse_rational(e->value);
    } catch (const Error&) {
      error(key, "malformed number '" + e->value + "'");
      return std::nullopt;
    }
  }

  std::optional<double> real(std::string_view key) {
    const auto r = rational(key);
    if (!r) return std::nullopt;
    return to_double(*r);
  }

  std::optional<bool> boolean(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    error(key, "expected true or false, got '" + e->value + "'");
    return std::nullopt;
  }

  std::optional<Distribution> distribution(std::string_view key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    std::vector<Rational> p;
    for (std::string_view item : split(e->value, ',')) {
      try {
        p.push_back(parse_rational(item));
      } catch (const Error&) {
        error(key, "malformed number '" + std::string(item) + "'");
        return std::nullopt;
      }
    }
    Rational sum = 0;
    for (const Rational& v : p) {
      if (v < 0) {
        error(key, "invalid distribution: negative entry " + to_string(v));
        return std::nullopt;
      }
      sum += v;
    }
    if (sum != 1) {
      error(key, "invalid distribution: entries sum to " + to_string(sum) + ", not 1");
      return std::nullopt;
    }
    return Distribution::exact(std::move(p));
  }

  std::optional<GroupElement> element(std::string_view key, std::string_view text, GroupTag tag) {
    std::vector<Coord> c;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) {
      const auto v = parse_int<Coord>(token);
      if (!v) {
        error(key, "malformed coordinate '" + token + "'");
        return std::nullopt;
      }
      c.push_back(*v);
    }
    if (static_cast<int>(c.size()) != tag.rank) {
      error(key, "element '" + std::string(text) + "' needs " + std::to_string(tag.rank) +
                     " coordinates for " + tag.name());
      return std::nullopt;
    }
    return GroupElement::of(tag, c);
  }

  std::optional<std::vector<GroupElement>> elements(std::string_view key, GroupTag tag) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    std::vector<GroupElement> out;
    for (std::string_view item : split(e->value, ',')) {
      auto g = element(key, item, tag);
      if (!g) return std::nullopt;
      out.push_back(*g);
    }
    return out;
  }

  // "lo, hi": the half-open coordinate box between two corners.
  std::optional<FiniteSubset> box(std::string_view key, GroupTag tag) {
    const auto corners = elements(key, tag);
    if (!corners) return std::nullopt;
    if (corners->size() != 2) {
      error(key, "expected a box 'lo, hi'");
      return std::nullopt;
    }
    const auto lo = (*corners)[0].coords();
    const auto hi = (*corners)[1].coords();
    for (std::size_t i = 0; i < lo.size(); ++i) {
      if (hi[i] <= lo[i]) {
        error(key, "box is empty");
        return std::nullopt;
      }
    }
    return FiniteSubset::box(tag, lo, hi);
  }

  // "lo, hi, step": lattice points lo + k step inside the half-open box.
  std::optional<FiniteSubset> grid(std::string_view key, GroupTag tag) {
    const auto parts = elements(key, tag);
    if (!parts) return std::nullopt;
    if (parts->size() != 3) {
      error(key, "expected a grid 'lo, hi, step'");
      return std::nullopt;
    }
    std::vector<FiniteSubset::AxisProgression> axes;
    for (int i = 0; i < tag.rank; ++i) {
      const Coord step = (*parts)[2][i];
      if (step <= 0) {
        error(key, "grid steps must be positive");
        return std::nullopt;
      }
      axes.push_back({(*parts)[0][i], (*parts)[1][i], step});
    }
    FiniteSubset out = FiniteSubset::grid(tag, axes);
    if (out.empty()) {
      error(key, "grid is empty");
      return std::nullopt;
    }
    return out;
  }
};

void lex(std::string_view text, Reader& r) {
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      r.errors.push_back({"", line_no, "expected 'key = value', got '" + std::string(line) + "'"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      r.errors.push_back({"", line_no, "empty key"});
      continue;
    }
    if (!kFixedKeys.contains(key) && !std::regex_match(key, kIndexedKey) && !std::regex_match(key, kLevelKey)) {
      r.errors.push_back({key, line_no, "unknown key"});
      continue;
    }
    if (value.empty()) {
      r.errors.push_back({key, line_no, "empty value"});
      continue;
    }
    if (const Entry* prev = r.find(key)) {
      r.errors.push_back({key, line_no, "duplicate key (first set on line " + std::to_string(prev->line) + ")"});
      continue;
    }
    r.entries.emplace(key, Entry{value, line_no});
  }
}

// Indexed keys "prefix.<i>" present in the file, by index.
std::map<std::size_t, std::string> indexed(const Reader& r, std::string_view prefix) {
  std::map<std::size_t, std::string> out;
  std::smatch m;
  for (const auto& [key, entry] : r.entries) {
    if (std::regex_match(key, m, kIndexedKey) && m[1].str() == prefix) {
      out[std::stoul(m[2])] = key;
    }
  }
  return out;
}

std::optional<RdsModel> read_model(Reader& r, GroupTag group) {
  const Entry* kind = r.find("model");
  if (!kind) {
    r.missing("model", "bernoulli, random-alphabet or markov");
    return std::nullopt;
  }
  if (kind->value == "bernoulli") {
    if (!r.has("p")) r.missing("p", "fiber distribution");
    const auto p = r.distribution("p");
    if (!p) return std::nullopt;
    return RdsModel::trivial_base_bernoulli(group, *p);
  }
  if (kind->value == "random-alphabet") {
    if (!r.has("base_p")) r.missing("base_p", "base distribution");
    const auto base = r.distribution("base_p");
    if (!base) return std::nullopt;
    const auto keys = indexed(r, "fiber_p");
    std::vector<Distribution> fibers;
    bool ok = true;
    for (std::size_t b = 0; b < base->size(); ++b) {
      const std::string key = "fiber_p." + std::to_string(b);
      if (!keys.contains(b)) {
        r.missing(key, "one fiber distribution per base symbol");
        ok = false;
        continue;
      }
      auto d = r.distribution(key);
      if (!d) {
        ok = false;
        continue;
      }
      if (!fibers.empty() && d->size() != fibers.front().size()) {
        r.error(key, "fiber distributions must have the same number of symbols");
        ok = false;
      }
      fibers.push_back(std::move(*d));
    }
    for (const auto& [b, key] : keys) {
      if (b >= base->size()) {
        r.error(key, "base symbol " + std::to_string(b) + " does not exist");
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return RdsModel::random_alphabet_bernoulli(group, *base, std::move(fibers));
  }
  if (kind->value == "markov") {
    if (group != GroupTag::zd(1)) {
      r.error("group", "the markov model lives on zd:1");
      return std::nullopt;
    }
    const auto keys = indexed(r, "transition");
    if (keys.empty()) {
      r.missing("transition.0", "transition matrix rows");
      return std::nullopt;
    }
    std::vector<Distribution> rows;
    bool ok = true;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::string key = "transition." + std::to_string(i);
      if (!keys.contains(i)) {
        r.missing(key, "rows must be numbered 0.." + std::to_string(keys.size() - 1));
        ok = false;
        continue;
      }
      auto d = r.distribution(key);
      if (!d) {
        ok = false;
        continue;
      }
      if (d->size() != keys.size()) {
        r.error(key, "transition matrix must be square (" + std::to_string(keys.size()) + " entries per row)");
        ok = false;
      }
      rows.push_back(std::move(*d));
    }
    if (!ok) return std::nullopt;
    try {
      return RdsModel::markov_z(std::move(rows));
    } catch (const Error& e) {
      r.error("transition.0", e.what());
      return std::nullopt;
    }
  }
  r.error("model", "unknown model '" + kind->value + "' (bernoulli, random-alphabet, markov)");
  return std::nullopt;
}

std::optional<CoverSpec> read_cover(Reader& r, GroupTag group) {
  CoverSpec spec;
  const Entry* lemma = r.find("lemma");
  if (!lemma) {
    r.missing("lemma", "lem11 or lem12");
    return std::nullopt;
  }
  if (lemma->value == "lem11") {
    spec.lemma = CoverLemma::kLem11;
  } else if (lemma->value == "lem12") {
    spec.lemma = CoverLemma::kLem12;
  } else {
    r.error("lemma", "expected lem11 or lem12, got '" + lemma->value + "'");
    return std::nullopt;
  }
  if (group.kind != GroupKind::kZd) {
    r.error("group", "cover-demo supports zd groups only");
    return std::nullopt;
  }

  // shape.<i>[.<j>] and centers.<i>[.<j>], 1-based and contiguous.
  std::map<std::pair<std::size_t, std::size_t>, std::string> shape_keys, center_keys;
  std::smatch m;
  bool ok = true;
  for (const auto& [key, entry] : r.entries) {
    if (!std::regex_match(key, m, kLevelKey)) continue;
    const std::size_t i = std::stoul(m[2]);
    const bool has_j = m[3].matched;
    const std::size_t j = has_j ? std::stoul(m[3]) : 1;
    if (i == 0 || j == 0) {
      r.error(key, "levels are numbered from 1");
      ok = false;
      continue;
    }
    if (has_j != (spec.lemma == CoverLemma::kLem12)) {
      r.error(key, spec.lemma == CoverLemma::kLem12 ? "lem12 keys take two indices (shape.i.j)"
                                                    : "lem11 keys take one index (shape.i)");
      ok = false;
      continue;
    }
    (m[1] == "shape" ? shape_keys : center_keys)[{i, j}] = key;
  }
  if (shape_keys.empty()) {
    r.missing(spec.lemma == CoverLemma::kLem12 ? "shape.1.1" : "shape.1", "at least one shape");
    return std::nullopt;
  }
  CoverInstance& inst = spec.instance;
  inst.lemma = spec.lemma;
  inst.tag = group;
  for (const auto& [ij, key] : shape_keys) {
    const auto [i, j] = ij;
    if (i > inst.shapes.size() + 1 || (i == inst.shapes.size() + 1 && j != 1) ||
        (i == inst.shapes.size() && j != inst.shapes.back().size() + 1)) {
      r.error(key, "shape indices must be contiguous from 1");
      ok = false;
      break;
    }
    if (i == inst.shapes.size() + 1) {
      inst.shapes.emplace_back();
      inst.centers.emplace_back();
    }
    auto shape = r.box(key, group);
    const std::string ckey = (spec.lemma == CoverLemma::kLem12)
                                 ? "centers." + std::to_string(i) + "." + std::to_string(j)
                                 : "centers." + std::to_string(i);
    std::optional<FiniteSubset> centers;
    if (!r.has(ckey)) {
      r.missing(ckey, "centres for " + key);
    } else {
      centers = r.grid(ckey, group);
    }
    if (!shape || !centers) {
      ok = false;
      inst.shapes.back().emplace_back(group);
      inst.centers.back().emplace_back(group);
      continue;
    }
    inst.shapes.back().push_back(std::move(*shape));
    inst.centers.back().push_back(std::move(*centers));
  }
  for (const auto& [ij, key] : center_keys) {
    if (!shape_keys.contains(ij)) {
      r.error(key, "centres without a matching shape");
      ok = false;
    }
  }

  if (!r.has("ambient")) r.missing("ambient", "the set F being covered");
  if (auto a = r.box("ambient", group)) inst.ambient = *a; else ok = false;
  if (auto d = r.rational("delta")) inst.delta = *d;
  if (auto e = r.rational("epsilon")) inst.epsilon = *e;
  if (auto c = r.rational("C")) inst.c = *c;
  if (auto a = r.rational("alpha")) inst.alpha = *a;
  if (spec.lemma == CoverLemma::kLem12) {
    if (!r.has("k_set")) r.missing("k_set", "the set K of lem12");
    if (auto k = r.box("k_set", group)) inst.k_set = *k; else ok = false;
  }
  if (auto s = r.integer<std::size_t>("samples", 1)) spec.samples = *s;
  if (auto c = r.boolean("check_hypotheses")) spec.check_hypotheses = *c;
  if (auto q = r.real("retention")) {
    if (*q < 0.0 || *q > 1.0) r.error("retention", "must lie in [0, 1]");
    spec.retention = *q;
  }
  if (const Entry* e = r.find("expect")) {
    if (e->value == "pass" || e->value == "fail") {
      spec.expect_pass = e->value == "pass";
    } else {
      r.error("expect", "expected pass or fail");
    }
  }
  if (!ok) return std::nullopt;
  return spec;
}

// |F_{n_max}| of the sequence the runner would build, or nullopt past the cap.
std::optional<std::size_t> final_folner_size(GroupTag group, int n_max, Coord scale) {
  double size = 1.0;
  if (group.kind == GroupKind::kHeisenberg) {
    size = std::pow(static_cast<double>(n_max), 4);
  } else {
    size = std::pow(static_cast<double>(n_max) * static_cast<double>(scale), group.rank);
  }
  if (size > static_cast<double>(kMaxFolnerSize)) return std::nullopt;
  return static_cast<std::size_t>(size);
}

}  // namespace

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::kSmbRun: return "smb-run";
    case Subcommand::kCondEntropy: return "cond-entropy";
    case Subcommand::kFolnerCheck: return "folner-check";
    case Subcommand::kCocycleCheck: return "cocycle-check";
    case Subcommand::kCoverDemo: return "cover-demo";
  }
  return "?";
}

std::optional<Subcommand> parse_subcommand(std::string_view text) {
  for (Subcommand s : {Subcommand::kSmbRun, Subcommand::kCondEntropy, Subcommand::kFolnerCheck,
                       Subcommand::kCocycleCheck, Subcommand::kCoverDemo}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

namespace {

std::string describe(const std::vector<ConfigError>& errors) {
  std::string out;
  for (const ConfigError& e : errors) {
    if (!out.empty()) out += '\n';
    if (e.line) out += "line " + std::to_string(e.line) + ": ";
    if (!e.key.empty()) out += "key '" + e.key + "': ";
    out += e.reason;
  }
  return out;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<ConfigError> errors)
    : std::runtime_error(describe(errors)), errors_(std::move(errors)) {}

ExperimentConfig parse_config(std::string_view text, const Overrides& overrides) {
  Reader r;
  lex(text, r);
  ExperimentConfig cfg;

  std::optional<Subcommand> sub = overrides.subcommand;
  if (const Entry* e = r.find("subcommand")) {
    const auto from_file = parse_subcommand(e->value);
    if (!from_file) {
      r.error("subcommand", "unknown subcommand '" + e->value + "'");
    } else if (sub && *sub != *from_file) {
      r.error("subcommand", "file says '" + e->value + "' but the command line asks for '" +
                                std::string(to_string(*sub)) + "'");
    } else {
      sub = from_file;
    }
  }
  if (!sub) {
    if (!r.has("subcommand")) r.missing("subcommand", "or give it on the command line");
    throw ConfigErrors(std::move(r.errors));
  }
  cfg.subcommand = *sub;

  if (overrides.seed) {
    cfg.seed = *overrides.seed;
  } else if (!r.has("seed")) {
    r.missing("seed", "runs are never seeded from the clock");
  } else if (auto s = r.integer<std::uint64_t>("seed", 0)) {
    cfg.seed = *s;
  }

  if (overrides.output) {
    cfg.output = *overrides.output;
  } else if (const Entry* e = r.find("output")) {
    cfg.output = e->value;
  } else {
    r.missing("output", "or pass --out");
  }

  if (overrides.workers) {
    cfg.workers = *overrides.workers;
  } else if (auto w = r.integer<std::size_t>("workers", 1)) {
    cfg.workers = *w;
  }
  if (cfg.workers == 0) r.errors.push_back({"workers", 0, "must be at least 1"});

  const bool markov = r.find("model") && r.find("model")->value == "markov";
  cfg.group = GroupTag::zd(1);
  if (const Entry* e = r.find("group")) {
    try {
      cfg.group = GroupTag::parse(e->value);
    } catch (const Error&) {
      r.error("group", "expected zd:<d> with 1 <= d <= 4, or heisenberg; got '" + e->value + "'");
    }
  } else if (!markov && cfg.subcommand != Subcommand::kCoverDemo) {
    r.missing("group", "zd:<d> or heisenberg");
  }

  const bool traced = cfg.subcommand == Subcommand::kSmbRun || cfg.subcommand == Subcommand::kCondEntropy;
  if (traced || cfg.subcommand == Subcommand::kCocycleCheck) cfg.model = read_model(r, cfg.group);

  if (traced || cfg.subcommand == Subcommand::kFolnerCheck) {
    if (!r.has("n_max")) r.missing("n_max", "length of the Foelner sequence");
    if (auto n = r.integer<int>("n_max", 1)) cfg.n_max = *n;
    if (auto s = r.integer<Coord>("folner_scale", 1)) {
      if (cfg.group.kind == GroupKind::kHeisenberg && *s != 1) {
        r.error("folner_scale", "only boxes in zd groups can be scaled");
      }
      cfg.folner_scale = *s;
    }
    if (cfg.n_max > 0 && !final_folner_size(cfg.group, cfg.n_max, cfg.folner_scale)) {
      r.error("n_max", "infeasible: F_n_max would exceed " + std::to_string(kMaxFolnerSize) + " elements");
    }
  }

  if (traced) {
    if (auto t = r.integer<std::size_t>("trajectories", 1)) cfg.trajectories = *t;
    if (auto s = r.integer<std::size_t>("samples", 1)) cfg.samples = *s;
    if (auto m = r.boolean("monte_carlo")) cfg.monte_carlo = *m;
    if (auto t = r.real("tolerance")) {
      if (*t <= 0.0) r.error("tolerance", "must be positive");
      cfg.tolerance = *t;
    }
    cfg.check_from = cfg.subcommand == Subcommand::kSmbRun ? static_cast<std::size_t>(cfg.n_max)
                                                          : std::min<std::size_t>(2, static_cast<std::size_t>(cfg.n_max));
    if (auto c = r.integer<std::size_t>("check_from", 1)) {
      if (*c > static_cast<std::size_t>(cfg.n_max)) r.error("check_from", "exceeds n_max");
      cfg.check_from = *c;
    }
  }

  if (cfg.subcommand == Subcommand::kFolnerCheck) {
    std::vector<GroupElement> k{GroupElement::identity(cfg.group)};
    for (int i = 0; i < cfg.group.rank; ++i) {
      if (cfg.group.kind == GroupKind::kHeisenberg && i == 2) break;
      std::array<Coord, kMaxRank> c{};
      c[static_cast<std::size_t>(i)] = 1;
      k.push_back(GroupElement::of(cfg.group, std::span<const Coord>(c.data(), static_cast<std::size_t>(cfg.group.rank))));
    }
    if (auto given = r.elements("k_set", cfg.group)) k = *given;
    cfg.k_set = FiniteSubset(cfg.group, std::move(k));
    if (cfg.group.kind == GroupKind::kZd) cfg.tempered_bound = Rational(1 << cfg.group.rank);
    if (auto b = r.rational("tempered_bound")) cfg.tempered_bound = *b;
  }

  if (cfg.subcommand == Subcommand::kCocycleCheck) {
    if (auto c = r.integer<std::size_t>("checks", 1)) cfg.checks = *c;
    if (auto c = r.integer<std::size_t>("invariance_checks", 0)) cfg.invariance_checks = *c;
    if (auto w = r.integer<Coord>("window", 0)) cfg.window = *w;
    if (auto b = r.integer<Coord>("element_bound", 0)) cfg.element_bound = *b;
  }

  if (cfg.subcommand == Subcommand::kCoverDemo) cfg.cover = read_cover(r, cfg.group);

  if (!r.errors.empty()) throw ConfigErrors(std::move(r.errors));
  return cfg;
}

}  // namespace rdsmb::cli
