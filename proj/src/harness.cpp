#include "senate/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "senate/error.hpp"
#include "senate/sortition.hpp"
#include "senate/world.hpp"

namespace senate {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_rate(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Decision of each senator as broadcast to the whole network.
std::vector<std::optional<double>> decision_broadcasts(const std::vector<SenatorSpec>& senators,
                                                       const AgreementTranscript& tr, Rng& rng) {
  std::vector<std::optional<double>> out(senators.size());
  const double agreed = tr.agreed_value().value_or(tr.proposal);
  for (std::size_t i = 0; i < senators.size(); ++i) {
    const auto& s = senators[i];
    if (s.is_faulty()) {
      BaContext ctx{BaContext::Phase::Decision, 0, s.initial_value, agreed};
      out[i] = ba_emit(*s.faulty, ctx, rng);
    } else {
      out[i] = tr.decisions[i];
    }
  }
  return out;
}

void score(EpisodeResult& r, const std::vector<double>& good_sorted, int n, int f, int t) {
  if (!r.decision || good_sorted.empty()) return;
  r.median_valid = r.agreement_ok && median_valid_interval(good_sorted, n, f, t).contains(*r.decision);
  r.median_valid_actual =
      r.agreement_ok && median_valid_interval(good_sorted, n, f, f).contains(*r.decision);
}

}  // namespace

std::string EpisodeResult::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["n_faulty"] = n_faulty;
  j["seat_owners"] = seat_owners;
  j["faulty_seats"] = faulty_seats;
  j["sybil_seats"] = sybil_seats;
  j["slots_elapsed"] = slots_elapsed;
  j["asymmetric_pairs"] = asymmetric_pairs;
  j["removed"] = removed;
  j["removed_faulty"] = removed_faulty;
  j["wnc_rounds"] = wnc_rounds;
  j["senators"] = senators;
  j["valid_senate"] = valid_senate;
  j["faulty_senators"] = faulty_senators;
  j["decision"] = decision ? nlohmann::ordered_json(*decision) : nlohmann::ordered_json(nullptr);
  j["failure_reason"] = failure_reason;
  j["agreement_ok"] = agreement_ok;
  j["median_valid"] = median_valid;
  j["median_valid_actual"] = median_valid_actual;
  return j.dump(2);
}

EpisodeResult run_episode(const ScenarioConfig& config, std::uint64_t seed, EpisodeTrace* trace) {
  EpisodeResult r;
  r.seed = seed;
  r.n_faulty = config.n_faulty;
  const World world = spawn_world(config, seed);

  try {
    Rng chorus_rng = make_stream(seed, Stream::Chorus);
    const auto reports = run_chorus(world, config.chorus_slots, config.attack, chorus_rng);

    AlohaParams aloha{config.n_candidates, config.tx_cost, config.slot_cap, config.ranging};
    Rng slot_rng = make_stream(seed, Stream::Aloha);
    Rng ranging_rng = make_stream(seed, Stream::Ranging);
    const SortitionOutcome sortition = run_aloha(world, reports, aloha, slot_rng, ranging_rng);
    r.slots_elapsed = sortition.slots_elapsed;
    for (const auto& seat : sortition.candidates) {
      r.seat_owners.push_back(seat.owner);
      if (world[static_cast<std::size_t>(seat.owner)].is_faulty) {
        ++r.faulty_seats;
        if (seat.is_pseudonym()) ++r.sybil_seats;
      }
    }
    const auto seat_is_faulty = [&](int index) {
      const auto& seat = sortition.candidates[static_cast<std::size_t>(index)];
      return world[static_cast<std::size_t>(seat.owner)].is_faulty;
    };
    const auto seat_number = [&](int index) {
      return sortition.candidates[static_cast<std::size_t>(index)].seat;
    };

    Rng adversary_rng = make_stream(seed, Stream::Adversary);
    const FeedbackTable feedback = collect_feedback(sortition, world, config.attack, adversary_rng);
    const Edm<double> verified = symmetry_verify(feedback.edm, config.effective_symmetry_tol());
    r.asymmetric_pairs =
        static_cast<int>((verified.valid != feedback.edm.valid).count() / 2);

    WncParams wnc;
    wnc.step = config.wnc_step;
    wnc.error_blend = config.wnc_error_blend;
    wnc.removal_factor = config.removal_factor;
    wnc.max_rounds = config.max_wnc_rounds;
    wnc.sweeps_per_round = config.wnc_sweeps_per_round;
    wnc.error_floor = config.wnc_error_floor;
    Rng wnc_rng = make_stream(seed, Stream::Wnc);
    const WncResult coords = robust_wnc(verified, wnc, wnc_rng, trace ? &trace->wnc : nullptr);
    r.wnc_rounds = coords.rounds;
    for (const int idx : coords.removed) {
      r.removed.push_back(seat_number(idx));
      if (seat_is_faulty(idx)) ++r.removed_faulty;
    }

    Rng kmeans_rng = make_stream(seed, Stream::Kmeans);
    SenateRoster roster = select_senate(coords.coords, coords.survivors, config.n_senators, kmeans_rng);
    r.valid_senate = roster.valid;
    if (!roster.valid) throw Error(ErrorCode::Quorum, "too few candidates survived for a senate");

    std::sort(roster.senators.begin(), roster.senators.end());
    std::vector<SenatorSpec> senators;
    std::vector<double> good_values;
    for (const int idx : roster.senators) {
      r.senators.push_back(seat_number(idx));
      const auto& owner = world[static_cast<std::size_t>(sortition.candidates[static_cast<std::size_t>(idx)].owner)];
      SenatorSpec spec{owner.initial_value, std::nullopt};
      if (owner.is_faulty) {
        spec.faulty = config.attack.ba_strategy;
        ++r.faulty_senators;
      } else {
        good_values.push_back(owner.initial_value);
      }
      senators.push_back(spec);
    }

    const AgreementParams params{config.n_senators, config.agreement_fault_budget, r.faulty_senators};
    Rng agreement_rng = make_stream(seed, Stream::Agreement);
    AgreementTranscript tr = run_agreement(senators, params, agreement_rng);

    Rng finalize_rng = make_stream(seed, Stream::Finalize);
    const auto broadcasts = decision_broadcasts(senators, tr, finalize_rng);
    const bool senate_agreed = tr.agreed_value().has_value() || good_values.empty();
    r.decision = finalize_network(broadcasts);
    // The final broadcast is common, so every good node adopts the same value.
    r.agreement_ok = senate_agreed;
    if (trace) trace->agreement = std::move(tr);

    score(r, sorted(good_values), config.n_senators, r.faulty_senators, config.agreement_fault_budget);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    r.decision.reset();
    r.agreement_ok = false;
    r.failure_reason = std::string(error_code_name(e.code()));
  }
  return r;
}

EpisodeResult run_baseline_episode(const ScenarioConfig& config, std::uint64_t seed,
                                   bool with_sybil, AgreementTranscript* transcript) {
  EpisodeResult r;
  r.seed = seed;
  r.n_faulty = config.n_faulty;
  const World world = spawn_world(config, seed);

  std::vector<SenatorSpec> identities;
  std::vector<double> good_values;
  int faulty_identities = 0;
  for (const auto& node : world) {
    if (!node.is_faulty) {
      identities.push_back({node.initial_value, std::nullopt});
      good_values.push_back(node.initial_value);
      r.seat_owners.push_back(node.id);
      continue;
    }
    const int copies = with_sybil ? std::max(1, config.attack.sybil_seats) : 1;
    for (int c = 0; c < copies; ++c) {
      identities.push_back({node.initial_value, config.attack.ba_strategy});
      r.seat_owners.push_back(node.id);
      ++faulty_identities;
      if (c > 0) ++r.sybil_seats;
    }
  }
  r.faulty_seats = faulty_identities;
  r.faulty_senators = faulty_identities;
  r.valid_senate = true;
  for (std::size_t i = 0; i < identities.size(); ++i) r.senators.push_back(static_cast<int>(i) + 1);

  const int k = static_cast<int>(identities.size());
  const int t = (k - 1) / 3;
  try {
    Rng rng = make_stream(seed, Stream::Baseline);
    AgreementTranscript tr = run_agreement(identities, {k, t, faulty_identities}, rng);
    const auto broadcasts = decision_broadcasts(identities, tr, rng);
    r.decision = finalize_network(broadcasts);
    r.agreement_ok = tr.agreed_value().has_value() || good_values.empty();
    score(r, sorted(good_values), k, faulty_identities, t);
    if (transcript) *transcript = std::move(tr);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    r.decision.reset();
    r.agreement_ok = false;
    r.failure_reason = std::string(error_code_name(e.code()));
  }
  return r;
}

SweepRow summarize(const std::vector<EpisodeResult>& episodes, int faulty_count, bool baseline,
                   std::uint64_t seed) {
  SweepRow row;
  row.faulty_count = faulty_count;
  row.episodes = static_cast<int>(episodes.size());
  row.baseline = baseline;
  row.seed = seed;
  if (episodes.empty()) return row;
  for (const auto& e : episodes) {
    if (e.decision && e.agreement_ok) row.consensus_rate += 1.0;
    if (e.median_valid) row.valid_rate += 1.0;
    row.mean_sybil_seats += e.sybil_seats;
    row.mean_faulty_senators += e.faulty_senators;
  }
  const double n = static_cast<double>(episodes.size());
  row.consensus_rate /= n;
  row.valid_rate /= n;
  row.mean_sybil_seats /= n;
  row.mean_faulty_senators /= n;
  return row;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const std::vector<int>& faulty_counts,
                                int episodes, const SweepOptions& options) {
  if (episodes < 1) throw Error(ErrorCode::Config, "episodes must be positive");
  std::vector<ScenarioConfig> configs;
  for (const int f : faulty_counts) {
    ScenarioConfig c = config;
    c.n_faulty = f;
    c.validate();
    configs.push_back(c);
  }

  const std::size_t per_row = static_cast<std::size_t>(episodes);
  const std::size_t total = configs.size() * per_row;
  std::vector<EpisodeResult> results(total);

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const auto& c = configs[task / per_row];
      const std::uint64_t seed = config.seed + task % per_row;
      switch (options.arm) {
        case SweepArm::Senate: results[task] = run_episode(c, seed); break;
        case SweepArm::Baseline: results[task] = run_baseline_episode(c, seed, false); break;
        case SweepArm::BaselineSybil: results[task] = run_baseline_episode(c, seed, true); break;
      }
    }
  };
  unsigned workers = options.workers > 0 ? static_cast<unsigned>(options.workers)
                                         : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::vector<EpisodeResult> slice(results.begin() + static_cast<long>(i * per_row),
                                     results.begin() + static_cast<long>((i + 1) * per_row));
    rows.push_back(summarize(slice, faulty_counts[i], options.arm != SweepArm::Senate, config.seed));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "schema=1\n"
      << "faulty_count,episodes,consensus_rate,valid_rate,mean_sybil_seats,mean_faulty_senators,baseline,seed\n";
  for (const auto& r : rows) {
    out << r.faulty_count << ',' << r.episodes << ',' << format_rate(r.consensus_rate) << ','
        << format_rate(r.valid_rate) << ',' << format_rate(r.mean_sybil_seats) << ','
        << format_rate(r.mean_faulty_senators) << ',' << (r.baseline ? 1 : 0) << ',' << r.seed << '\n';
  }
}

void write_wnc_trace(std::ostream& out, const std::vector<WncTraceRow>& rows) {
  out << "round,candidate,x,y,error\n";
  for (const auto& r : rows) {
    out << r.round << ',' << r.candidate << ',' << format_double(r.x) << ',' << format_double(r.y)
        << ',' << format_double(r.error) << '\n';
  }
}

void write_ba_trace(std::ostream& out, const AgreementTranscript& transcript) {
  out << "round,leader,proposal,accepts,adopted\n";
  for (const auto& r : transcript.rounds) {
    out << r.round << ',' << r.leader << ','
        << (r.leader_value ? format_double(*r.leader_value) : std::string()) << ',' << r.accepts
        << ',' << (r.adopted ? 1 : 0) << '\n';
  }
}

}  // namespace senate
