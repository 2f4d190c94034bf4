#include "senate/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>
#include <vector>

#include "senate/error.hpp"

namespace senate {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::Config,
              "invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

double to_double(std::string_view key, std::string_view value) {
  // std::from_chars for double is unavailable on older libstdc++.
  std::string text(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != text.size() || !std::isfinite(out)) bad_value(key, value);
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value);
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

ValueRange to_range(std::string_view key, std::string_view value) {
  const auto parts = split(value, ':');
  if (parts.size() != 2) bad_value(key, value);
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

using Setter = std::function<void(ScenarioConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"n_nodes", [](auto& c, auto k, auto v) { c.n_nodes = to_int<int>(k, v); }},
      {"n_faulty", [](auto& c, auto k, auto v) { c.n_faulty = to_int<int>(k, v); }},
      {"n_candidates", [](auto& c, auto k, auto v) { c.n_candidates = to_int<int>(k, v); }},
      {"n_senators", [](auto& c, auto k, auto v) { c.n_senators = to_int<int>(k, v); }},
      {"chorus_slots", [](auto& c, auto k, auto v) { c.chorus_slots = to_int<int>(k, v); }},
      {"tx_cost", [](auto& c, auto k, auto v) { c.tx_cost = to_double(k, v); }},
      {"symmetry_tol",
       [](auto& c, auto k, auto v) {
         if (v == "auto")
           c.symmetry_tol.reset();
         else
           c.symmetry_tol = to_double(k, v);
       }},
      {"wnc_step", [](auto& c, auto k, auto v) { c.wnc_step = to_double(k, v); }},
      {"wnc_error_blend", [](auto& c, auto k, auto v) { c.wnc_error_blend = to_double(k, v); }},
      {"removal_factor", [](auto& c, auto k, auto v) { c.removal_factor = to_double(k, v); }},
      {"max_wnc_rounds", [](auto& c, auto k, auto v) { c.max_wnc_rounds = to_int<int>(k, v); }},
      {"wnc_sweeps_per_round",
       [](auto& c, auto k, auto v) { c.wnc_sweeps_per_round = to_int<int>(k, v); }},
      {"wnc_error_floor", [](auto& c, auto k, auto v) { c.wnc_error_floor = to_double(k, v); }},
      {"area_side", [](auto& c, auto k, auto v) { c.area_side = to_double(k, v); }},
      {"ranging", [](auto& c, auto, auto v) { c.ranging = parse_ranging(v); }},
      {"agreement_fault_budget",
       [](auto& c, auto k, auto v) { c.agreement_fault_budget = to_int<int>(k, v); }},
      {"seed", [](auto& c, auto k, auto v) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"episodes", [](auto& c, auto k, auto v) { c.episodes = to_int<int>(k, v); }},
      {"slot_cap", [](auto& c, auto k, auto v) { c.slot_cap = to_int<long>(k, v); }},
      {"good_values", [](auto& c, auto k, auto v) { c.good_values = to_range(k, v); }},
      {"faulty_values", [](auto& c, auto k, auto v) { c.faulty_values = to_range(k, v); }},
      {"attack.chorus_always_transmit",
       [](auto& c, auto k, auto v) { c.attack.chorus_always_transmit = to_bool(k, v); }},
      {"attack.sybil_seats",
       [](auto& c, auto k, auto v) { c.attack.sybil_seats = to_int<int>(k, v); }},
      {"attack.shout_offset",
       [](auto& c, auto k, auto v) { c.attack.shout_offset = to_double(k, v); }},
      {"attack.shout_mode",
       [](auto& c, auto k, auto v) {
         if (v == "independent")
           c.attack.shout_mode = ShoutMode::Independent;
         else if (v == "shared")
           c.attack.shout_mode = ShoutMode::Shared;
         else
           bad_value(k, v);
       }},
      {"attack.asymmetric_lie",
       [](auto& c, auto k, auto v) { c.attack.asymmetric_lie = to_bool(k, v); }},
      {"attack.ba_strategy", [](auto& c, auto, auto v) { c.attack.ba_strategy = parse_ba_strategy(v); }},
  };
  return table;
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

}  // namespace

RangingModel parse_ranging(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1 && parts[0] == "perfect") return ranging::Perfect{};
  if (parts.size() == 2) {
    const double std_dev = to_double("ranging", parts[1]);
    if (std_dev < 0.0) bad_value("ranging", text);
    if (parts[0] == "toa") return ranging::ToA{std_dev};
    if (parts[0] == "rss") return ranging::Rss{std_dev};
  }
  bad_value("ranging", text);
}

BaStrategy parse_ba_strategy(std::string_view text) {
  constexpr std::string_view key = "attack.ba_strategy";
  const auto parts = split(text, ':');
  const auto name = parts[0];
  if (name == "honest" && parts.size() == 1) return ba::Honest{};
  if (name == "silent" && parts.size() == 1) return ba::Silent{};
  if (name == "extreme") {
    if (parts.size() == 1) return ba::ExtremeValue{};
    if (parts.size() == 2) return ba::ExtremeValue{to_double(key, parts[1])};
  }
  if (name == "random") {
    if (parts.size() == 1) return ba::RandomVote{};
    if (parts.size() == 3) {
      ba::RandomVote r{to_double(key, parts[1]), to_double(key, parts[2])};
      if (r.lo > r.hi) bad_value(key, text);
      return r;
    }
  }
  bad_value(key, text);
}

void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorCode::Config, "unknown config key '" + std::string(key) + "'");
  it->second(config, key, value);
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected 'key = value'");
    apply_setting(config, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file '" + path + "'");
  return parse_config(in);
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::Config, what);
  };
  require(n_nodes >= 1, "n_nodes must be at least 1");
  require(n_faulty >= 0 && n_faulty <= n_nodes, "n_faulty must lie in [0, n_nodes]");
  require(n_candidates >= 1 && n_candidates <= n_nodes, "n_candidates must lie in [1, n_nodes]");
  require(n_senators >= 1 && n_senators <= n_candidates, "n_senators must lie in [1, n_candidates]");
  require(agreement_fault_budget >= 0, "agreement_fault_budget must be non-negative");
  require(n_senators >= 3 * agreement_fault_budget + 1,
          "n_senators must be at least 3 * agreement_fault_budget + 1");
  require(chorus_slots >= 2, "chorus_slots must be at least 2");
  require(tx_cost > 0.0 && tx_cost < 1.0, "tx_cost must lie in (0, 1)");
  require(!symmetry_tol || *symmetry_tol > 0.0, "symmetry_tol must be positive");
  require(wnc_step > 0.0, "wnc_step must be positive");
  require(wnc_error_blend > 0.0 && wnc_error_blend <= 1.0, "wnc_error_blend must lie in (0, 1]");
  require(removal_factor > 1.0, "removal_factor must exceed 1");
  require(max_wnc_rounds >= 1, "max_wnc_rounds must be positive");
  require(wnc_sweeps_per_round >= 1, "wnc_sweeps_per_round must be positive");
  require(wnc_error_floor >= 0.0, "wnc_error_floor must be non-negative");
  require(area_side > 0.0, "area_side must be positive");
  require(episodes >= 1, "episodes must be positive");
  require(slot_cap >= 0, "slot_cap must be non-negative");
  require(good_values.lo <= good_values.hi, "good_values must be an ordered range");
  require(faulty_values.lo <= faulty_values.hi, "faulty_values must be an ordered range");
  require(attack.sybil_seats >= 1, "attack.sybil_seats must be at least 1");
}

double ScenarioConfig::effective_symmetry_tol() const {
  if (symmetry_tol) return *symmetry_tol;
  constexpr double floor = 1e-6;
  return std::visit(
      [&](const auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, ranging::ToA>) {
          return std::max(floor, 6.0 * model.additive_std * model.additive_std);
        } else if constexpr (std::is_same_v<T, ranging::Rss>) {
          const double spread = model.mult_log_std * area_side;
          return std::max(floor, 6.0 * spread * spread);
        } else {
          return floor;
        }
      },
      ranging);
}

std::string to_config_text(const ScenarioConfig& c) {
  std::ostringstream out;
  auto ranging_text = std::visit(
      [](const auto& model) -> std::string {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, ranging::ToA>)
          return "toa:" + format_double(model.additive_std);
        else if constexpr (std::is_same_v<T, ranging::Rss>)
          return "rss:" + format_double(model.mult_log_std);
        else
          return "perfect";
      },
      c.ranging);
  auto strategy_text = std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ba::ExtremeValue>)
          return s.value ? "extreme:" + format_double(*s.value) : std::string("extreme");
        else if constexpr (std::is_same_v<T, ba::Silent>)
          return "silent";
        else if constexpr (std::is_same_v<T, ba::RandomVote>)
          return "random:" + format_double(s.lo) + ":" + format_double(s.hi);
        else
          return "honest";
      },
      c.attack.ba_strategy);

  out << "n_nodes = " << c.n_nodes << '\n'
      << "n_faulty = " << c.n_faulty << '\n'
      << "n_candidates = " << c.n_candidates << '\n'
      << "n_senators = " << c.n_senators << '\n'
      << "chorus_slots = " << c.chorus_slots << '\n'
      << "tx_cost = " << format_double(c.tx_cost) << '\n'
      << "symmetry_tol = " << (c.symmetry_tol ? format_double(*c.symmetry_tol) : "auto") << '\n'
      << "wnc_step = " << format_double(c.wnc_step) << '\n'
      << "wnc_error_blend = " << format_double(c.wnc_error_blend) << '\n'
      << "removal_factor = " << format_double(c.removal_factor) << '\n'
      << "max_wnc_rounds = " << c.max_wnc_rounds << '\n'
      << "wnc_sweeps_per_round = " << c.wnc_sweeps_per_round << '\n'
      << "wnc_error_floor = " << format_double(c.wnc_error_floor) << '\n'
      << "area_side = " << format_double(c.area_side) << '\n'
      << "ranging = " << ranging_text << '\n'
      << "agreement_fault_budget = " << c.agreement_fault_budget << '\n'
      << "seed = " << c.seed << '\n'
      << "episodes = " << c.episodes << '\n'
      << "slot_cap = " << c.slot_cap << '\n'
      << "good_values = " << format_double(c.good_values.lo) << ':' << format_double(c.good_values.hi) << '\n'
      << "faulty_values = " << format_double(c.faulty_values.lo) << ':' << format_double(c.faulty_values.hi) << '\n'
      << "attack.chorus_always_transmit = " << (c.attack.chorus_always_transmit ? "true" : "false") << '\n'
      << "attack.sybil_seats = " << c.attack.sybil_seats << '\n'
      << "attack.shout_offset = " << format_double(c.attack.shout_offset) << '\n'
      << "attack.shout_mode = " << (c.attack.shout_mode == ShoutMode::Shared ? "shared" : "independent") << '\n'
      << "attack.asymmetric_lie = " << (c.attack.asymmetric_lie ? "true" : "false") << '\n'
      << "attack.ba_strategy = " << strategy_text << '\n';
  return out.str();
}

}  // namespace senate
