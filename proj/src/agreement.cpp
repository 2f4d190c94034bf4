#include "senate/agreement.hpp"

#include <algorithm>
#include <map>

#include "senate/error.hpp"

namespace senate {

ValueInterval median_valid_interval(const std::vector<double>& good_sorted, int n, int f, int t) {
  if (good_sorted.empty()) throw Error(ErrorCode::NoGoodValues, "no good values to score against");
  const int count = static_cast<int>(good_sorted.size());
  const int center = (n - f + 1) / 2 - 1;
  const int lo = std::clamp(center - t, 0, count - 1);
  const int hi = std::clamp(center + t, 0, count - 1);
  return {good_sorted[static_cast<std::size_t>(lo)], good_sorted[static_cast<std::size_t>(hi)]};
}

double lower_median(std::vector<double> values) {
  auto mid = values.begin() + static_cast<long>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

std::optional<double> AgreementTranscript::agreed_value() const {
  std::optional<double> value;
  for (const auto& d : decisions) {
    if (!d) continue;
    if (value && *value != *d) return std::nullopt;
    value = d;
  }
  return value;
}

AgreementTranscript run_agreement(const std::vector<SenatorSpec>& senators,
                                  const AgreementParams& params, Rng& rng) {
  const int k = params.k;
  const int t = params.t;
  if (t < 0 || k < 3 * t + 1)
    throw Error(ErrorCode::Config, "agreement needs k >= 3t + 1");
  if (static_cast<int>(senators.size()) != k)
    throw Error(ErrorCode::Config, "senator count differs from k");

  const auto at = [](auto& v, int i) -> auto& { return v[static_cast<std::size_t>(i)]; };
  AgreementTranscript tr;
  tr.initial_broadcasts.resize(static_cast<std::size_t>(k));
  tr.decisions.resize(static_cast<std::size_t>(k));

  // Setup: one broadcast each, heard identically by everyone.
  for (int i = 0; i < k; ++i) {
    const auto& s = at(senators, i);
    if (s.is_faulty()) {
      BaContext ctx{BaContext::Phase::Setup, 0, s.initial_value, s.initial_value};
      at(tr.initial_broadcasts, i) = ba_emit(*s.faulty, ctx, rng);
    } else {
      at(tr.initial_broadcasts, i) = s.initial_value;
    }
    if (at(tr.initial_broadcasts, i)) tr.received.push_back(*at(tr.initial_broadcasts, i));
  }
  std::sort(tr.received.begin(), tr.received.end());
  if (tr.received.empty()) return tr;

  const int r = static_cast<int>(tr.received.size());
  const int lo = std::min(t, (r - 1) / 2);
  const int hi = std::max(r - 1 - t, r / 2);
  tr.acceptable = {at(tr.received, lo), at(tr.received, hi)};
  tr.proposal = lower_median(tr.received);

  std::vector<std::optional<double>> proposals(static_cast<std::size_t>(k));
  std::vector<std::optional<double>> current(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto& s = at(senators, i);
    if (s.is_faulty()) {
      BaContext ctx{BaContext::Phase::Proposal, 0, s.initial_value, tr.proposal};
      at(proposals, i) = ba_emit(*s.faulty, ctx, rng);
    } else {
      at(proposals, i) = tr.proposal;
      at(current, i) = tr.proposal;
    }
  }

  for (int round = 1; round <= t + 1; ++round) {
    AgreementRound rec;
    rec.round = round;
    rec.leader = (round - 1) % k;
    const auto& leader = at(senators, rec.leader);

    std::vector<double> heard;
    for (int i = 0; i < k; ++i) {
      const auto& p = at(senators, i).is_faulty() ? at(proposals, i) : at(current, i);
      if (p) heard.push_back(*p);
    }
    const double honest = std::clamp(heard.empty() ? tr.proposal : lower_median(heard),
                                     tr.acceptable.low, tr.acceptable.high);
    if (leader.is_faulty()) {
      BaContext ctx{BaContext::Phase::Leader, round, leader.initial_value, honest};
      rec.leader_value = ba_emit(*leader.faulty, ctx, rng);
    } else {
      rec.leader_value = honest;
    }

    rec.votes.resize(static_cast<std::size_t>(k));
    if (rec.leader_value) {
      const double v = *rec.leader_value;
      for (int i = 0; i < k; ++i) {
        const auto& s = at(senators, i);
        if (s.is_faulty() && !std::holds_alternative<ba::Honest>(*s.faulty)) {
          BaContext ctx{BaContext::Phase::Decision, round, s.initial_value, v};
          at(rec.votes, i) = ba_vote(*s.faulty, ctx, v, rng);
        } else {
          at(rec.votes, i) = tr.acceptable.contains(v);
        }
        if (at(rec.votes, i).value_or(false)) ++rec.accepts;
      }
      if (rec.accepts >= k - t) {
        rec.adopted = true;
        for (int i = 0; i < k; ++i)
          if (!at(senators, i).is_faulty()) at(current, i) = v;
      }
    }
    rec.current = current;
    tr.rounds.push_back(std::move(rec));
  }

  tr.decisions = current;
  return tr;
}

double finalize_network(const std::vector<std::optional<double>>& broadcasts) {
  std::map<double, int> tally;
  for (const auto& b : broadcasts)
    if (b) ++tally[*b];
  if (tally.empty()) throw Error(ErrorCode::NoBroadcast, "no senator broadcast a decision");
  // std::map iterates ascending, so strict > keeps the smallest among ties.
  auto best = tally.begin();
  for (auto it = tally.begin(); it != tally.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

}  // namespace senate
