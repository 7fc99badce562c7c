#include "naf/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <fmt/chrono.h>
#include <fmt/core.h>

#include "naf/error.hpp"
#include "naf/harness/manifest.hpp"
#include "naf/harness/protected_model.hpp"
#include "naf/nafl.hpp"
#include "naf/parallel.hpp"

namespace naf::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Tag : std::uint64_t { kPromptTag = 101, kSparpsPrompts, kSynthetic, kSample, kValidation };

std::string num(double v) { return fmt::format("{:.10g}", v); }

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error(Errc::input_missing, fmt::format("cannot write {}", path.string()));
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

fs::path prepare(const ExperimentConfig& c, const std::string& file) {
  fs::create_directories(c.output_dir);
  return c.output_dir / file;
}

std::vector<MethodId> without(const std::vector<MethodId>& methods,
                              std::initializer_list<MethodId> drop) {
  std::vector<MethodId> out;
  for (MethodId m : methods) {
    if (std::find(drop.begin(), drop.end(), m) == drop.end()) out.push_back(m);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<KxRow> kx_hist_logits(const ExperimentConfig& c) {
  const auto& in = *c.logits;
  for (const auto& path : {in.p, in.q}) {
    if (!fs::exists(path)) throw Error(Errc::input_missing, fmt::format("missing {}", path.string()));
  }
  const bool has_b = !in.b.empty();
  if (has_b && !fs::exists(in.b)) {
    throw Error(Errc::input_missing, fmt::format("missing {}", in.b.string()));
  }
  std::vector<MethodId> methods = without(c.methods, {MethodId::no_cp});
  if (!has_b) methods = without(methods, {MethodId::scp_delta_r_b, MethodId::scp_delta_r_c});

  NaflReader rp(in.p);
  NaflReader rq(in.q, rp.vocab_size());
  std::optional<TokenDist> cbase;
  std::optional<NaflReader> rb;
  if (has_b) {
    NaflReader first(in.b, rp.vocab_size());
    std::vector<TokenDist> refs;
    while (refs.size() < c.base_reference_contexts) {
      auto rec = first.next();
      if (!rec) break;
      refs.push_back(std::move(rec->dist));
    }
    if (refs.empty()) throw Error(Errc::input_missing, "base logits file has no records");
    cbase = constant_base(refs);
    rb.emplace(in.b, rp.vocab_size());
  }
  if (rq.record_count() != rp.record_count() || (rb && rb->record_count() != rp.record_count())) {
    throw Error(Errc::misaligned_ensembles, "logits files hold different record counts");
  }
  std::vector<KxRow> rows;
  std::size_t index = 0;
  while (auto p = rp.next()) {
    auto q = rq.next();
    std::optional<LogitsRecord> b;
    if (rb) b = rb->next();
    if (q->prompt_id != p->prompt_id || (b && b->prompt_id != p->prompt_id)) {
      throw Error(Errc::misaligned_ensembles,
                  fmt::format("prompt ids differ at record {}", index));
    }
    for (MethodId m : methods) {
      const TokenDist& base = b ? b->dist : p->dist;
      const TokenDist& cb = cbase ? *cbase : p->dist;
      rows.push_back({index, m, aggregate_dists(m, p->dist, q->dist, base, cb, c.smoothing_m).k_x});
    }
    ++index;
  }
  return rows;
}

}  // namespace

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(Errc::empty_list, "percentile of an empty list");
  std::sort(values.begin(), values.end());
  auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()) - 1e-12));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

double next_token_accuracy(const NextTokenModel& model, const std::vector<TteExample>& examples) {
  if (examples.empty()) throw Error(Errc::empty_examples, "no examples");
  std::vector<char> hit(examples.size(), 0);
  parallel_for(examples.size(), [&](std::size_t i) {
    hit[i] = model.next(examples[i].prefix).argmax() == examples[i].target ? 1 : 0;
  });
  const auto hits = std::count(hit.begin(), hit.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(examples.size());
}

std::vector<KxRow> kx_hist(const ExperimentConfig& c) {
  validate(c);
  if (c.logits) return kx_hist_logits(c);
  const std::uint64_t seed = c.seeds.front();
  const World w = build_world(c, seed);
  const ModelSet ms = train_models(w, c, c.lambda, seed);
  const auto prompts = sample_prompts(w, c.prompts, derive_seed(seed, kPromptTag));
  const auto methods = without(c.methods, {MethodId::no_cp});
  std::vector<KxRow> rows(prompts.size() * methods.size());
  parallel_for(prompts.size(), [&](std::size_t x) {
    const TokenDist p = ms.p->next(prompts[x]);
    const TokenDist q = ms.q->next(prompts[x]);
    const TokenDist b = ms.b->next(prompts[x]);
    for (std::size_t k = 0; k < methods.size(); ++k) {
      rows[x * methods.size() + k] = {
          x, methods[k], aggregate_dists(methods[k], p, q, b, ms.constant_base, c.smoothing_m).k_x};
    }
  });
  return rows;
}

std::vector<TdeRow> tde_bounds(const ExperimentConfig& c) {
  validate(c);
  const std::uint64_t seed = c.seeds.front();
  const World w = build_world(c, seed);
  const ModelSet ms = train_models(w, c, c.lambda, seed, /*with_p0=*/true);
  const auto methods = without(c.methods, {MethodId::no_cp, MethodId::cp_delta_kl});
  if (methods.empty()) throw Error(Errc::config_invalid, "tde-bounds needs a CP method");
  const std::size_t per_target = 3;
  std::vector<std::vector<TdeRow>> slots(w.canaries.size() * per_target);
  parallel_for(slots.size(), [&](std::size_t s) {
    const std::size_t target = s / per_target, pos = s % per_target;
    const auto& canary = w.canaries[target];
    Sequence ctx = w.canary_prefixes[target];
    ctx.insert(ctx.end(), canary.begin(), canary.begin() + static_cast<std::ptrdiff_t>(pos));
    const Token y = canary[pos];
    const TokenDist p1 = ms.p->next(ctx), p0 = ms.p0->next(ctx), q = ms.q->next(ctx),
                    b = ms.b->next(ctx);
    for (MethodId m : methods) {
      const auto r1 = aggregate_dists(m, p1, q, b, ms.constant_base, c.smoothing_m);
      const auto r0 = aggregate_dists(m, p0, q, b, ms.constant_base, c.smoothing_m);
      const bool smoothed = r1.smoothed_inputs.has_value();
      const Rpd q_side = smoothed ? r0.smoothed_inputs->second.rpd : to_rpd(q);
      const Rpd p0_side = smoothed ? r0.smoothed_inputs->first.rpd : to_rpd(p0);
      slots[s].push_back({target, pos, m, lira_bound_vx(r1, r0, q_side, p0_side, y),
                          r1.exact_log_p[y] - r0.exact_log_p[y]});
      if (m != MethodId::cp_delta) {
        const double log_q = smoothed ? r1.smoothed_inputs->second.log_probs()[y] : q.log_prob(y);
        slots[s].push_back({target, pos, m, lira_bound_tx(r1, q), r1.exact_log_p[y] - log_q});
      }
    }
  });
  std::vector<TdeRow> rows;
  for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
  return rows;
}

std::vector<SyntheticCell> synthetic_prop(const ExperimentConfig& c) {
  validate(c);
  const auto& sc = c.synthetic;
  const std::vector<std::string> names{"cp_delta", "cp_delta_r", "scp_delta_r"};
  const std::size_t levels = sc.spike_log_boosts.size(), trials = sc.trials;
  std::vector<SyntheticCell> cells;
  for (SyntheticKind kind : sc.schemes) {
    for (double boost : sc.spike_log_boosts) {
      for (const auto& name : names) {
        SyntheticCell cell;
        cell.scheme = kind;
        cell.spike_log_boost = boost;
        cell.method = name;
        cell.v_x.assign(trials, 0.0);
        cell.p1_target.assign(trials, 0.0);
        cell.target_kept_in_q.assign(trials, 0);
        cells.push_back(std::move(cell));
      }
    }
  }
  for (std::size_t k = 0; k < sc.schemes.size(); ++k) {
    parallel_for(trials, [&](std::size_t t) {
      const std::uint64_t trial_seed =
          derive_seed(derive_seed(c.seeds.front(), kSynthetic + 1000 * (k + 1)), t);
      SyntheticScheme scheme{sc.schemes[k], sc.vocab_size, 0.0, trial_seed};
      for (std::size_t l = 0; l < levels; ++l) {
        scheme.spike_log_boost = sc.spike_log_boosts[l];
        const SyntheticInstance inst = synth_instance(scheme);
        const Token y = inst.y_s;
        const auto base = (k * levels + l) * names.size();
        {
          const auto r1 = cp_delta(inst.p1, inst.q), r0 = cp_delta(inst.p0, inst.q);
          cells[base].v_x[t] = lira_bound_vx(r1, r0, to_rpd(inst.q), to_rpd(inst.p0), y).value;
        }
        {
          const auto r1 = cp_delta_r(inst.p1, inst.q), r0 = cp_delta_r(inst.p0, inst.q);
          cells[base + 1].v_x[t] =
              lira_bound_vx(r1, r0, to_rpd(inst.q), to_rpd(inst.p0), y).value;
        }
        {
          const auto r1 = scp_delta_r(inst.b, inst.p1, inst.q, sc.m);
          const auto r0 = scp_delta_r(inst.b, inst.p0, inst.q, sc.m);
          cells[base + 2].v_x[t] = lira_bound_vx(r1, r0, r0.smoothed_inputs->second.rpd,
                                                 r0.smoothed_inputs->first.rpd, y)
                                       .value;
          cells[base + 2].target_kept_in_q[t] = r1.smoothed_inputs->second.is_kept(y) ? 1 : 0;
        }
        for (std::size_t i = 0; i < names.size(); ++i) cells[base + i].p1_target[t] = inst.p1.prob(y);
      }
    });
  }
  return cells;
}

ExpectedSparpsCurve expected_sparps_toy(const ExperimentConfig& c) {
  validate(c);
  if (c.seeds.size() < 2) {
    throw Error(Errc::config_invalid, "expected-sparps needs at least 2 seeds");
  }
  const std::uint64_t seed = c.seeds.front();
  const World w = build_world(c, seed);
  const auto prompts = sample_prompts(w, c.sparps_prompts, derive_seed(seed, kSparpsPrompts));
  RpdEnsemble ep(c.seeds.size()), eq(c.seeds.size());
  parallel_for(c.seeds.size(), [&](std::size_t s) {
    const ModelSet ms = train_models(w, c, c.lambda, c.seeds[s]);
    for (const auto& x : prompts) {
      ep[s].push_back(to_rpd(ms.p->next(x)));
      eq[s].push_back(to_rpd(ms.q->next(x)));
    }
  });
  for (const RpdEnsemble* e : {&ep, &eq}) {
    bool varies = false;
    for (std::size_t s = 1; s < e->size() && !varies; ++s) {
      for (std::size_t x = 0; x < prompts.size() && !varies; ++x) {
        varies = (*e)[s][x].log_r != (*e)[0][x].log_r;
      }
    }
    if (!varies) {
      throw Error(Errc::degenerate_ensemble, "ensemble members are identical across seeds");
    }
  }
  auto curve = expected_sparps(ep, eq, c.sparps_m_values, c.sparps_c_values);
  for (std::size_t i = 0; i < curve.m_values.size(); ++i) {
    for (std::size_t j = 0; j < curve.c_values.size(); ++j) {
      const double v = curve.b_matrix[i][j];
      for (std::size_t i2 = 0; i2 < curve.m_values.size(); ++i2) {
        if (curve.m_values[i2] > curve.m_values[i] && curve.b_matrix[i2][j] > v) {
          throw std::logic_error("B(m, C) increased with m");
        }
      }
      for (std::size_t j2 = 0; j2 < curve.c_values.size(); ++j2) {
        if (curve.c_values[j2] > curve.c_values[j] && curve.b_matrix[i][j2] < v) {
          throw std::logic_error("B(m, C) decreased with C");
        }
      }
    }
  }
  return curve;
}

CanaryOutcome run_canary(const ExperimentConfig& c, const World& w, const ModelSet& models,
                         const std::vector<MethodId>& methods, std::size_t m) {
  CanaryOutcome out;
  out.space_size = w.canary_space.cardinality();
  const auto sample_seed = derive_seed(c.seeds.front(), kSample);
  // Every method sees the same p, q and b distributions, so compute them once
  // per canary.
  CachedModel p(*models.p), q(*models.q), b(*models.b);
  auto score = [&](const Sequence& prefix, const Sequence& canary, bool control) {
    for (MethodId method : methods) {
      const ProtectedModel model(method, p, q, b, models.constant_base, m);
      auto& bucket = control ? out.control_exposure[method] : out.exposure[method];
      bucket.push_back(CandidateScores(model, prefix, w.canary_space, sample_seed).exposure(canary));
    }
    p.clear();
    q.clear();
    b.clear();
  };
  for (std::size_t i = 0; i < w.canaries.size(); ++i) {
    score(w.canary_prefixes[i], w.canaries[i], false);
  }
  for (std::size_t i = 0; i < w.control_canaries.size(); ++i) {
    score(w.control_prefixes[i], w.control_canaries[i], true);
  }
  return out;
}

PiiOutcome run_pii(const ExperimentConfig& c, const World& w, const ModelSet& models) {
  PiiOutcome out;
  for (MethodId method : c.methods) {
    out.results[method] = pii_extract(ProtectedModel(method, models, c.smoothing_m), w.pii_p);
  }
  out.no_cp_val = pii_extract(*models.p, w.pii_heldout);
  return out;
}

TteOutcome run_tte(const ExperimentConfig& c, const World& w) {
  TteOutcome out;
  const std::uint64_t seed = c.seeds.front();
  const auto members = tte_examples(w.text_p, c.tte_examples, seed);
  const auto heldout = tte_examples(w.validation, c.tte_examples, seed);
  for (double lambda : c.lambda_sweep) {
    const ModelSet ms = train_models(w, c, lambda, seed);
    std::map<MethodId, AttackReport> reports;
    for (MethodId method : c.methods) {
      reports[method] =
          tte(ProtectedModel(method, ms, c.smoothing_m), members, c.tte_filter, ms.q.get());
    }
    out.lambdas.push_back(lambda);
    out.reports.push_back(std::move(reports));
    out.no_cp_val.push_back(tte(*ms.p, heldout, c.tte_filter, ms.q.get()));
  }
  return out;
}

std::vector<SweepRow> smoothing_sweep(const ExperimentConfig& c) {
  validate(c);
  const std::uint64_t seed = c.seeds.front();
  const World w = build_world(c, seed);
  const ModelSet ms = train_models(w, c, c.lambda, seed);
  const auto validation = tte_examples(w.validation, c.tte_examples, derive_seed(seed, kValidation));
  std::vector<SweepRow> rows;
  for (std::size_t m : c.m_sweep) {
    const std::vector<MethodId> methods{MethodId::scp_delta_r_b, MethodId::scp_delta_r_c};
    const auto outcome = run_canary(c, w, ms, methods, m);
    for (MethodId method : methods) {
      const auto& e = outcome.exposure.at(method);
      rows.push_back({m, method, mean_of(e), percentile(e, 0.99),
                      next_token_accuracy(ProtectedModel(method, ms, m), validation)});
    }
  }
  return rows;
}

std::vector<fs::path> cmd_kx_hist(const ExperimentConfig& c) {
  const auto rows = kx_hist(c);
  const auto path = prepare(c, "kx_hist.csv");
  Csv csv(path, {"row_kind", "prompt", "method", "k_x_nats"});
  std::map<MethodId, std::vector<double>> by_method;
  for (const auto& r : rows) {
    csv.row({"prompt", std::to_string(r.prompt), std::string(to_string(r.method)), num(r.k_x)});
    by_method[r.method].push_back(r.k_x);
  }
  for (const auto& [m, v] : by_method) {
    csv.row({"mean", "", std::string(to_string(m)), num(mean_of(v))});
    csv.row({"p99", "", std::string(to_string(m)), num(percentile(v, 0.99))});
  }
  return {path};
}

std::vector<fs::path> cmd_tde_bounds(const ExperimentConfig& c) {
  const auto rows = tde_bounds(c);
  const auto path = prepare(c, "tde_bounds.csv");
  Csv csv(path, {"target", "position", "method", "bound_kind", "bound_nats", "realized_nats",
                 "k_x_term_nats", "typical_ratio_term_nats", "token_term_nats"});
  for (const auto& r : rows) {
    csv.row({std::to_string(r.target), std::to_string(r.position),
             std::string(to_string(r.method)), std::string(to_string(r.bound.kind)),
             num(r.bound.value), num(r.realized), num(r.bound.k_x_term),
             num(r.bound.typical_ratio_term), num(r.bound.token_term)});
  }
  return {path};
}

std::vector<fs::path> cmd_synthetic_prop(const ExperimentConfig& c) {
  const auto cells = synthetic_prop(c);
  const auto path = prepare(c, "synthetic_prop.csv");
  Csv csv(path, {"scheme", "spike_log_boost_nats", "method", "trials", "mean_p1_target_prob",
                 "mean_v_x_nats", "std_v_x_nats", "target_kept_rate_prob",
                 "sign_test_p_vs_cp_delta_r"});
  const std::size_t width = 3;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    std::string kept, sign;
    if (cell.method == "scp_delta_r") {
      const auto hits = std::count(cell.target_kept_in_q.begin(), cell.target_kept_in_q.end(), 1);
      kept = num(static_cast<double>(hits) / static_cast<double>(cell.target_kept_in_q.size()));
      const auto& cp_r = cells[i - i % width + 1];
      sign = num(paired_sign_test(cp_r.v_x, cell.v_x));
    }
    csv.row({std::string(to_string(cell.scheme)), num(cell.spike_log_boost), cell.method,
             std::to_string(cell.v_x.size()), num(mean_of(cell.p1_target)), num(mean_of(cell.v_x)),
             num(stddev_of(cell.v_x)), kept, sign});
  }
  return {path};
}

std::vector<fs::path> cmd_attack(const ExperimentConfig& c) {
  validate(c);
  const std::uint64_t seed = c.seeds.front();
  const World w = build_world(c, seed);
  json report{{"attack", c.attack}, {"lambda", c.lambda}, {"smoothing_m", c.smoothing_m}};
  if (c.attack == "canary") {
    const ModelSet ms = train_models(w, c, c.lambda, seed);
    const auto out = run_canary(c, w, ms, c.methods, c.smoothing_m);
    report["exposure_units"] = "bits";
    report["candidate_space_size"] = out.space_size;
    report["canary_repetitions"] = c.canary_repetitions;
    for (const auto& [m, e] : out.exposure) {
      report["methods"][std::string(to_string(m))] = {
          {"exposure_scores", e},
          {"mean_exposure", mean_of(e)},
          {"random_canary_baseline", out.control_exposure.at(m)},
          {"random_canary_baseline_mean", mean_of(out.control_exposure.at(m))}};
    }
    const auto val = run_canary(c, w, ms, {MethodId::no_cp}, c.smoothing_m);
    const auto& ctl = val.control_exposure.at(MethodId::no_cp);
    report["no_cp_val"] = {{"exposure_scores", ctl}, {"mean_exposure", mean_of(ctl)}};
  } else if (c.attack == "pii") {
    const ModelSet ms = train_models(w, c, c.lambda, seed);
    const auto out = run_pii(c, w, ms);
    for (const auto& [m, r] : out.results) {
      report["methods"][std::string(to_string(m))] = {
          {"ael", r.ael}, {"fer", r.fer}, {"extracted_lengths", r.extracted_lengths}};
    }
    report["no_cp_val"] = {{"ael", out.no_cp_val.ael}, {"fer", out.no_cp_val.fer}};
  } else {
    const auto out = run_tte(c, w);
    report["auc_convention"] = "trapezoid over realized coverage, divided by its width";
    report["filter_q_failures"] = c.tte_filter;
    json sweep = json::array();
    for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
      json entry{{"lambda", out.lambdas[i]}};
      auto encode = [](const AttackReport& r) {
        json curve = json::array();
        for (const auto& p : r.curve) curve.push_back({p.coverage, p.accuracy});
        return json{{"auc", *r.auc}, {"acc", *r.acc}, {"examples_used", r.examples_used},
                    {"curve_coverage_accuracy", curve}};
      };
      for (const auto& [m, r] : out.reports[i]) entry["methods"][std::string(to_string(m))] = encode(r);
      entry["no_cp_val"] = encode(out.no_cp_val[i]);
      sweep.push_back(std::move(entry));
    }
    report["lambda_sweep"] = std::move(sweep);
  }
  const auto path = prepare(c, fmt::format("attack_{}.json", c.attack));
  std::ofstream out(path);
  out << report.dump(2) << '\n';
  return {path};
}

std::vector<fs::path> cmd_expected_sparps(const ExperimentConfig& c) {
  const auto curve = expected_sparps_toy(c);
  const auto path = prepare(c, "expected_sparps.csv");
  Csv csv(path, {"m", "log2_m", "C_fraction", "B_nats", "prompts", "seeds"});
  for (std::size_t i = 0; i < curve.m_values.size(); ++i) {
    for (std::size_t j = 0; j < curve.c_values.size(); ++j) {
      csv.row({std::to_string(curve.m_values[i]),
               num(std::log2(static_cast<double>(std::max<std::size_t>(curve.m_values[i], 1)))),
               num(curve.c_values[j]), num(curve.b_matrix[i][j]),
               std::to_string(curve.prompt_count), std::to_string(curve.seed_count)});
    }
  }
  return {path};
}

std::vector<fs::path> cmd_smoothing_sweep(const ExperimentConfig& c) {
  const auto rows = smoothing_sweep(c);
  const auto path = prepare(c, "smoothing_sweep.csv");
  Csv csv(path, {"m", "method", "mean_exposure_bits", "p99_exposure_bits",
                 "toy_validation_accuracy_prob"});
  for (const auto& r : rows) {
    csv.row({std::to_string(r.m), std::string(to_string(r.method)), num(r.mean_exposure),
             num(r.p99_exposure), num(r.validation_accuracy)});
  }
  return {path};
}

std::vector<fs::path> run_command(const std::string& name, const ExperimentConfig& c) {
  using Fn = std::vector<fs::path> (*)(const ExperimentConfig&);
  static const std::map<std::string, Fn> table{
      {"kx-hist", cmd_kx_hist},           {"tde-bounds", cmd_tde_bounds},
      {"synthetic-prop", cmd_synthetic_prop}, {"attack", cmd_attack},
      {"expected-sparps", cmd_expected_sparps}, {"smoothing-sweep", cmd_smoothing_sweep}};
  const auto it = table.find(name);
  if (it == table.end()) throw Error(Errc::config_invalid, fmt::format("unknown command '{}'", name));
  validate(c);
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  auto files = it->second(c);
  RunManifest m;
  m.command = name;
  m.config_hash = config_hash(c);
  m.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.started_utc = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                              fmt::gmtime(std::chrono::system_clock::to_time_t(started)));
  m.files = files;
  const auto manifest = prepare(c, "manifest.json");
  write_manifest(manifest, m);
  files.push_back(manifest);
  return files;
}

}  // namespace naf::harness
