#include "lucon/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "lucon/error.hpp"
#include "lucon/parallel.hpp"

namespace lucon {

void validate(const SearchParams& params, std::size_t m_train, bool has_soft_labels) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(params.gamma >= 0.0 && params.gamma <= 2.0)) throw ConfigError("gamma must lie in [0, 2]");
  if (!(params.epsilon >= 0.0) || !std::isfinite(params.epsilon))
    throw ConfigError("epsilon must be a finite non-negative number");
  if (params.balls < 1) throw ConfigError("T must be at least 1");
  if (m_train == 0) throw ConfigError("training set is empty");
  if (params.gamma > 0.0 && !has_soft_labels)
    throw ConfigError("gamma > 0 requires soft labels");
  if (target_count(params.alpha, m_train) < static_cast<std::size_t>(params.balls))
    throw ConfigError("alpha * m must be at least T (one example per ball)");
}

std::size_t target_count(double alpha, std::size_t m) {
  const double md = static_cast<double>(m);
  auto c = static_cast<std::size_t>(std::ceil(alpha * md));
  c = std::min(c, m);
  while (c > 0 && static_cast<double>(c - 1) / md >= alpha) --c;
  while (c < m && static_cast<double>(c) / md < alpha) ++c;
  return c;
}

std::vector<std::size_t> SearchState::captured_init() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in_init.size(); ++i)
    if (in_init[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> SearchState::captured_exp() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in_exp.size(); ++i)
    if (in_exp[i]) out.push_back(i);
  return out;
}

KBounds k_bounds(const SearchState& state, const SearchParams& params, std::size_t m_train) {
  const std::size_t target = target_count(params.alpha, m_train);
  if (state.init_count >= target) return {};
  const std::size_t remaining = target - state.init_count;
  const auto steps_left = static_cast<std::size_t>(params.balls - state.iteration + 1);
  if (steps_left == 0) return {};
  return {(remaining + steps_left - 1) / steps_left, remaining};
}

SearchContext::SearchContext(const Dataset& train, const SearchParams& params,
                             std::size_t mem_cap_bytes, int threads)
    : train_(&train),
      params_(params),
      lu_(train.size(), 0),
      threshold_(fixed_threshold(params.gamma)),
      cache_(train.points, params.metric, mem_cap_bytes, threads),
      threads_(threads) {
  validate(params, train.size(), train.has_soft());
  if (train.has_soft()) {
    const auto scores = example_scores(train);
    for (std::size_t i = 0; i < scores.size(); ++i) lu_[i] = to_fixed(scores[i]);
  }
}

namespace {

struct StepBest {
  std::optional<Placement> best;
  double max_lu = -1.0;

  void offer(const Placement& p) {
    if (!best || better(p, *best)) best = p;
  }
  void merge(const StepBest& other) {
    if (other.best) offer(*other.best);
    max_lu = std::max(max_lu, other.max_lu);
  }
};

[[noreturn]] void throw_infeasible(const SearchState& state, const SearchParams& params,
                                   double max_lu) {
  std::string msg = "no placement meets gamma=" + std::to_string(params.gamma) +
                    " at iteration " + std::to_string(state.iteration);
  if (max_lu >= 0.0) msg += " (max candidate LU " + std::to_string(max_lu) + ")";
  throw InfeasibleError(msg, state.iteration, static_cast<int>(state.balls.size()),
                        std::max(max_lu, 0.0));
}

struct Neighbor {
  float dist;
  LuFixed lu;
};

}  // namespace

Placement greedy_step(const SearchContext& ctx, const SearchState& state) {
  const std::size_t m = ctx.train().size();
  const SearchParams& params = ctx.params();
  const KBounds kb = k_bounds(state, params, m);
  if (kb.done()) throw std::logic_error("greedy_step called after the target was reached");

  const std::size_t workers = chunk_count(m, ctx.threads());
  std::vector<StepBest> partial(workers);
  const auto lu = ctx.lu();
  const LuFixed threshold = ctx.threshold();
  const double eps = params.epsilon;

  parallel_chunks(m, ctx.threads(), [&](std::size_t begin, std::size_t end, int worker) {
    StepBest& local = partial[static_cast<std::size_t>(worker)];
    std::vector<float> scratch;
    std::vector<Neighbor> active;
    std::vector<float> outside_exp;
    std::vector<LuFixed> prefix;
    active.reserve(m);
    outside_exp.reserve(m);

    for (std::size_t u = begin; u < end; ++u) {
      const auto row = ctx.cache().row(u, scratch);
      active.clear();
      outside_exp.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (!state.in_init[j]) active.push_back({row[j], lu[j]});
        if (!state.in_exp[j]) outside_exp.push_back(row[j]);
      }
      const std::size_t k_hi = std::min(kb.upper, active.size());
      if (kb.lower > k_hi) continue;

      // Only neighbors up to the k_hi-th distance (and its ties) matter.
      auto by_dist = [](const Neighbor& a, const Neighbor& b) { return a.dist < b.dist; };
      auto kth = active.begin() + static_cast<std::ptrdiff_t>(k_hi - 1);
      std::nth_element(active.begin(), kth, active.end(), by_dist);
      const float r_max = kth->dist;
      auto head_end = std::partition(kth + 1, active.end(),
                                     [&](const Neighbor& nb) { return nb.dist <= r_max; });
      std::sort(active.begin(), head_end, by_dist);
      const auto head = static_cast<std::size_t>(head_end - active.begin());

      auto exp_end = std::partition(outside_exp.begin(), outside_exp.end(),
                                    [&](float d) { return within(d, r_max, eps); });
      std::sort(outside_exp.begin(), exp_end);
      const auto exp_head = static_cast<std::size_t>(exp_end - outside_exp.begin());

      prefix.assign(head + 1, 0);
      for (std::size_t i = 0; i < head; ++i) prefix[i + 1] = prefix[i] + active[i].lu;

      std::size_t n_init = 0;
      std::size_t n_exp = 0;
      for (std::size_t k = kb.lower; k <= k_hi; ++k) {
        const float r = active[k - 1].dist;
        n_init = std::max(n_init, k);
        while (n_init < head && active[n_init].dist <= r) ++n_init;
        while (n_exp < exp_head && within(outside_exp[n_exp], r, eps)) ++n_exp;

        const LuFixed sum = prefix[n_init];
        local.max_lu = std::max(local.max_lu, fixed_mean(sum, n_init));
        if (!meets_threshold(sum, n_init, threshold)) continue;

        Placement p;
        p.center_index = u;
        p.k = k;
        p.radius = r;
        p.init_count = n_init;
        p.exp_count = n_exp;
        p.objective = static_cast<std::int64_t>(n_exp) - static_cast<std::int64_t>(n_init);
        p.lu_sum = sum;
        local.offer(p);
      }
    }
  });

  StepBest total;
  for (const auto& p : partial) total.merge(p);
  if (!total.best) throw_infeasible(state, params, total.max_lu);
  return *total.best;
}

Placement reference_step(const Dataset& train, const SearchParams& params,
                         const SearchState& state) {
  const std::size_t m = train.size();
  const KBounds kb = k_bounds(state, params, m);
  if (kb.done()) throw std::logic_error("reference_step called after the target was reached");
  const LuFixed threshold = fixed_threshold(params.gamma);

  std::vector<std::size_t> active;
  std::vector<std::size_t> outside_exp;
  for (std::size_t j = 0; j < m; ++j) {
    if (!state.in_init[j]) active.push_back(j);
    if (!state.in_exp[j]) outside_exp.push_back(j);
  }

  std::optional<Placement> best;
  double max_lu = -1.0;
  for (std::size_t u = 0; u < m; ++u) {
    const auto center = train.points.row(u);
    for (std::size_t k = kb.lower; k <= kb.upper && k <= active.size(); ++k) {
      std::vector<float> dists;
      for (std::size_t j : active)
        dists.push_back(stored_distance(params.metric, train.points.row(j), center));
      std::sort(dists.begin(), dists.end());
      const double r = dists[k - 1];

      const auto init = ball_members(train.points, active, center, r, params.metric);
      const auto expd =
          ball_members(train.points, outside_exp, center, r + params.epsilon, params.metric);

      LuFixed sum = 0;
      if (train.has_soft())
        for (std::size_t j : init)
          sum += to_fixed(example_lu(train.soft->row(j), train.labels.labels[j]));
      max_lu = std::max(max_lu, fixed_mean(sum, init.size()));
      if (!meets_threshold(sum, init.size(), threshold)) continue;

      Placement p;
      p.center_index = u;
      p.k = k;
      p.radius = r;
      p.init_count = init.size();
      p.exp_count = expd.size();
      p.objective =
          static_cast<std::int64_t>(expd.size()) - static_cast<std::int64_t>(init.size());
      p.lu_sum = sum;
      if (!best || better(p, *best)) best = p;
    }
  }
  if (!best) throw_infeasible(state, params, max_lu);
  return *best;
}

void apply_placement(SearchState& state, const Placement& placement, const Dataset& train,
                     const SearchParams& params) {
  const auto center = train.points.row(placement.center_index);
  std::size_t added_init = 0;
  std::size_t added_exp = 0;
  for (std::size_t j = 0; j < train.size(); ++j) {
    const float d = stored_distance(params.metric, train.points.row(j), center);
    if (!state.in_init[j] && within(d, placement.radius)) {
      state.in_init[j] = 1;
      ++added_init;
    }
    if (!state.in_exp[j] && within(d, placement.radius, params.epsilon)) {
      state.in_exp[j] = 1;
      ++added_exp;
    }
  }
  if (added_init != placement.init_count || added_exp != placement.exp_count)
    throw std::logic_error("placement does not reproduce its captured sets");
  state.init_count += added_init;
  state.exp_count += added_exp;
  state.init_lu.sum += placement.lu_sum;
  state.init_lu.count += added_init;
  state.balls.push_back({placement.center_index, {center.begin(), center.end()}, placement.radius});
  ++state.iteration;
}

SearchResult run_search(const Dataset& train, const SearchParams& params,
                        const SearchOptions& options) {
  const SearchContext ctx(train, params, options.mem_cap_bytes, options.threads);
  SearchState state(train.size());
  SearchResult result;
  while (state.iteration <= params.balls) {
    const KBounds kb = k_bounds(state, params, train.size());
    if (kb.done()) break;
    const Placement p = greedy_step(ctx, state);
    if (options.on_step) options.on_step(state.iteration, kb, p);
    apply_placement(state, p, train, params);
    result.placements.push_back(p);
  }
  result.region = {params.metric, std::move(state.balls)};
  result.captured = state.init_count;
  result.captured_lu = state.init_lu.count > 0 ? state.init_lu.mean() : 0.0;
  return result;
}

}  // namespace lucon
