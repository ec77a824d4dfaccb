#include "lupi/experiment.hpp"

#include "lupi/data_io.hpp"
#include "lupi/serialize.hpp"
#include "lupi/svmplus.hpp"
#include "lupi/weighting.hpp"
#include "lupi/wsvm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace lupi {

namespace {

const std::vector<std::string> kMethods{"svm", "wsvm-prob", "wsvm-learned", "svmplus", "wsvm-from-svmplus"};

struct Pool {
  Dataset data;
  std::optional<PrivilegedSet> priv;
  std::optional<Vector> eta;
};

struct Sources {
  Pool pool;
  std::optional<Dataset> validation;
  Dataset test;
};

Dataset with_ids(const Dataset& d, std::size_t offset) {
  std::vector<std::size_t> ids(static_cast<std::size_t>(d.size()));
  std::iota(ids.begin(), ids.end(), offset);
  return Dataset(d.x(), d.y(), std::move(ids));
}

Pool pool_from(const GeneratedSample& s) {
  Pool p;
  p.data = with_ids(s.data, 0);
  p.priv = s.privileged;
  if (s.eta.size() > 0) p.eta = s.eta;
  return p;
}

Sources load_sources(const ExperimentConfig& cfg, Eigen::Index validation_size) {
  Sources src;
  const bool fixed = cfg.split == SplitMode::fixed_validation;
  if (cfg.source == "wmixture") {
    const WMixture mix{cfg.w_sigma};
    src.pool = pool_from(mix.sample(cfg.pool_size, derive_seed(cfg.seed, 0xA1)));
    if (fixed) src.validation = with_ids(mix.sample(validation_size, derive_seed(cfg.seed, 0xA2)).data, 1u << 30);
    src.test = with_ids(mix.sample(cfg.test_size, derive_seed(cfg.seed, 0xA3)).data, 1u << 31);
  } else if (cfg.source == "blobs") {
    BlobConfig b = cfg.blobs;
    b.seed = derive_seed(cfg.seed, 0xB1);
    src.pool = pool_from(generate_blobs_with_outliers(b));
    if (fixed) {
      b.seed = derive_seed(cfg.seed, 0xB2);
      b.per_class = std::max<Eigen::Index>(1, validation_size / 2);
      src.validation = with_ids(generate_blobs_with_outliers(b).data, 1u << 30);
    }
    b.seed = derive_seed(cfg.seed, 0xB3);
    b.per_class = std::max<Eigen::Index>(1, cfg.test_size / 2);
    b.outliers = 0;
    src.test = with_ids(generate_blobs_with_outliers(b).data, 1u << 31);
  } else if (cfg.source == "files") {
    if (cfg.train_path.empty() || cfg.test_path.empty()) {
      throw InvalidInput("experiment: file source needs train and test paths");
    }
    Dataset train = read_sparse_file(cfg.train_path);
    Dataset test = read_sparse_file(cfg.test_path, train.dim());
    if (test.dim() > train.dim()) train = read_sparse_file(cfg.train_path, test.dim());
    src.pool.data = with_ids(train, 0);
    if (!cfg.privileged_path.empty()) src.pool.priv = read_privileged_file(cfg.privileged_path, train);
    if (!cfg.scores_path.empty()) {
      src.pool.eta = read_scores_file(cfg.scores_path);
      if (src.pool.eta->size() != train.size()) throw InvalidInput("experiment: scores file length mismatch");
    }
    src.test = with_ids(test, 1u << 31);
    if (fixed) {
      if (cfg.validation_path.empty()) throw InvalidInput("experiment: fixed validation needs a validation file");
      src.validation = with_ids(read_sparse_file(cfg.validation_path, train.dim()), 1u << 30);
    }
  } else {
    throw InvalidInput("experiment: unknown source '" + cfg.source + "'");
  }
  return src;
}

struct Split {
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> validation_rows;  // pool rows; empty for fixed validation
};

struct Prepared {
  Dataset train;
  Dataset validation;
  Dataset test;
  std::optional<PrivilegedSet> priv;
  std::optional<Vector> eta;
};

std::vector<double> bandwidths_for(const std::vector<double>& explicit_values, const std::vector<double>& quantiles,
                                   const Matrix& x) {
  std::vector<double> out = explicit_values;
  if (out.empty()) {
    const std::vector<double> d = pairwise_distances(x);
    for (double q : quantiles) {
      const double h = d.empty() ? 1.0 : quantile(d, q);
      out.push_back(h > 0.0 ? h : 1.0);
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<KernelSpec> specs_for(KernelKind kind, const std::vector<double>& explicit_values,
                                  const std::vector<double>& quantiles, const Matrix& x) {
  if (kind == KernelKind::linear) return {KernelSpec::linear()};
  std::vector<KernelSpec> specs;
  for (double h : bandwidths_for(explicit_values, quantiles, x)) specs.push_back(KernelSpec::rbf(h));
  return specs;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

struct Candidate {
  std::size_t spec = 0;
  double C = 0.0;
  double extra = 0.0;
  std::size_t priv_spec = 0;
  double val_error = 2.0;
};

struct GramCache {
  std::vector<Matrix> K;
  std::vector<Matrix> K_val;
  std::vector<Matrix> K_test;
};

GramCache make_cache(const std::vector<KernelSpec>& specs, const Prepared& p) {
  GramCache g;
  for (const KernelSpec& s : specs) {
    g.K.push_back(gram(s, p.train.x()));
    g.K_val.push_back(gram(s, p.validation.x(), p.train.x()));
    g.K_test.push_back(gram(s, p.test.x(), p.train.x()));
  }
  return g;
}

std::string describe(const KernelSpec& spec, double C) {
  return "kernel=" + spec.to_string() + " C=" + format_double(C);
}

class Job {
 public:
  Job(const ExperimentConfig& cfg, Prepared p, JobRecord& rec, std::vector<std::string>& log)
      : cfg_(cfg), p_(std::move(p)), rec_(rec), log_(log) {
    specs_ = specs_for(cfg.kernel, cfg.grids.bandwidths, cfg.grids.quantiles, p_.train.x());
    cache_ = make_cache(specs_, p_);
    Cs_ = sorted_unique(cfg.grids.C);
  }

  void run(std::vector<ReplicationCheck>& replication) {
    for (const std::string& method : cfg_.methods) {
      if (method == "svm") {
        rec_.test_error[method] = svm().first;
      } else if (method == "wsvm-prob") {
        rec_.test_error[method] = wsvm_prob();
      } else if (method == "wsvm-learned") {
        rec_.test_error[method] = wsvm_learned();
      } else if (method == "svmplus") {
        rec_.test_error[method] = svmplus().test_error;
      } else if (method == "wsvm-from-svmplus") {
        rec_.test_error[method] = wsvm_from_svmplus(replication);
      }
    }
  }

 private:
  struct SvmPlusFit {
    double test_error = 0.0;
    std::optional<SvmPlusModel> model;
    std::size_t spec = 0;
  };

  double test_error_of(const Vector& coef, double b, std::size_t spec) const {
    return error_rate((cache_.K_test[spec] * coef).array() + b, p_.test.y());
  }

  /// Grid search over (C, bandwidth[, extra]) for a WSVM whose weights depend on C and extra.
  template <typename Weights>
  std::pair<double, Candidate> tune_wsvm(const std::string& method, const std::vector<double>& extras,
                                         const Weights& weights) {
    Candidate best;
    std::optional<WsvmModel> best_model;
    WsvmOptions opts;
    opts.tol = cfg_.tol;
    for (double C : Cs_) {
      for (std::size_t s = 0; s < specs_.size(); ++s) {
        for (double extra : extras) {
          const Vector c = weights(C, extra);
          if (!(c.sum() > 0.0)) continue;
          WsvmModel m;
          try {
            m = assemble_wsvm(cache_.K[s], p_.train.y(), c, solve_wsvm_dual(cache_.K[s], p_.train.y(), c, opts), opts);
          } catch (const NotConverged& e) {
            log_.push_back(method + ": skipped grid cell: " + e.what());
            continue;
          }
          const double err = error_rate((cache_.K_val[s] * m.coefficients()).array() + m.b, p_.validation.y());
          if (err < best.val_error) {
            best = {s, C, extra, 0, err};
            best_model = std::move(m);
          }
        }
      }
    }
    if (!best_model) throw NotConverged(method + ": no grid cell could be fitted", 0.0);
    rec_.chosen[method] = describe(specs_[best.spec], best.C) + " extra=" + format_double(best.extra);
    return {test_error_of(best_model->coefficients(), best_model->b, best.spec), best};
  }

  std::pair<double, Candidate> svm() {
    if (!svm_) {
      svm_ = tune_wsvm("svm", {0.0}, [&](double C, double) { return Vector::Constant(p_.train.size(), C).eval(); });
    }
    return *svm_;
  }

  Vector training_eta() const {
    if (cfg_.eta_source == "exact" || cfg_.eta_source == "scores") {
      if (!p_.eta) throw InvalidInput("experiment: eta source '" + cfg_.eta_source + "' is unavailable");
      return *p_.eta;
    }
    if (cfg_.eta_source != "nadaraya-watson") throw InvalidInput("experiment: unknown eta source " + cfg_.eta_source);
    double h = cfg_.nw_bandwidth;
    if (!(h > 0.0)) {
      const std::vector<double> d = pairwise_distances(p_.train.x());
      h = d.empty() ? 1.0 : quantile(d, 0.1);
      if (!(h > 0.0)) h = 1.0;
    }
    return nadaraya_watson(p_.train, p_.train.x(), h).eta;
  }

  double wsvm_prob() {
    const Vector eta = training_eta();
    const std::vector<double> taus = sorted_unique(cfg_.grids.tau);
    return tune_wsvm("wsvm-prob", taus, [&](double C, double tau) {
             return Vector(C * probability_weights(eta, p_.train.y(), tau));
           }).first;
  }

  double wsvm_learned() {
    const Candidate base = svm().second;
    WeightLearningConfig lc = cfg_.learning;
    lc.initial = Vector::Constant(p_.train.size(), base.C);
    const WeightLearningResult r = learn_weights(p_.train, p_.validation, specs_[base.spec], lc);
    rec_.chosen["wsvm-learned"] = describe(specs_[base.spec], base.C) + " delta=" + format_double(r.delta);
    return error_rate(predict(r.model, p_.test.x()), p_.test.y());
  }

  SvmPlusFit svmplus() {
    if (svmplus_) return *svmplus_;
    if (!p_.priv) throw InvalidInput("experiment: SVM+ needs privileged features");
    const std::vector<KernelSpec> priv_specs =
        specs_for(cfg_.priv_kernel, cfg_.grids.priv_bandwidths, cfg_.grids.quantiles, p_.priv->x());
    std::vector<Matrix> Kt;
    for (const KernelSpec& s : priv_specs) Kt.push_back(gram(s, p_.priv->x()));
    const std::vector<double> gammas = sorted_unique(cfg_.grids.gamma);
    SvmPlusOptions opts;
    opts.tol = cfg_.tol;
    Candidate best;
    SvmPlusFit fit;
    for (double C : Cs_) {
      for (std::size_t s = 0; s < specs_.size(); ++s) {
        for (double g : gammas) {
          for (std::size_t ps = 0; ps < priv_specs.size(); ++ps) {
            SvmPlusModel m;
            try {
              m = solve_svmplus(p_.train, *p_.priv, specs_[s], priv_specs[ps], cache_.K[s], Kt[ps], C, g, opts);
            } catch (const NotConverged& e) {
              log_.push_back(std::string("svmplus: skipped grid cell: ") + e.what());
              continue;
            }
            const double err = error_rate((cache_.K_val[s] * m.coefficients()).array() + m.b, p_.validation.y());
            if (err < best.val_error) {
              best = {s, C, g, ps, err};
              fit.model = std::move(m);
              fit.spec = s;
            }
          }
        }
      }
    }
    if (!fit.model) throw NotConverged("svmplus: no grid cell could be fitted", 0.0);
    fit.test_error = test_error_of(fit.model->coefficients(), fit.model->b, fit.spec);
    rec_.chosen["svmplus"] = describe(specs_[best.spec], best.C) + " gamma=" + format_double(best.extra) +
                             " priv_kernel=" + priv_specs[best.priv_spec].to_string();
    svmplus_ = fit;
    return fit;
  }

  double wsvm_from_svmplus(std::vector<ReplicationCheck>& replication) {
    const SvmPlusFit fit = svmplus();
    const SvmPlusModel& sp = *fit.model;
    const Matrix& K = cache_.K[fit.spec];
    const Vector c = sp.alpha + sp.beta;
    WsvmOptions opts;
    opts.tol = cfg_.tol;
    const WsvmModel own = assemble_wsvm(K, p_.train.y(), c, solve_wsvm_dual(K, p_.train.y(), c, opts), opts);

    // Same weights with the SVM+ offset copied over.
    const Vector diff = own.coefficients() - sp.coefficients();
    const Vector f_plus = (cache_.K_test[fit.spec] * sp.coefficients()).array() + sp.b;
    const Vector f_copy = (cache_.K_test[fit.spec] * own.coefficients()).array() + sp.b;
    ReplicationCheck check;
    check.subset = rec_.subset;
    check.rep = rec_.rep;
    check.rkhs_difference = std::sqrt(std::max(0.0, diff.dot(K * diff)));
    check.max_decision_difference = (f_plus - f_copy).cwiseAbs().maxCoeff();
    Eigen::Index same = 0;
    for (Eigen::Index i = 0; i < f_plus.size(); ++i) same += label_of(f_plus[i]) == label_of(f_copy[i]) ? 1 : 0;
    check.agreement = f_plus.size() ? static_cast<double>(same) / static_cast<double>(f_plus.size()) : 1.0;
    replication.push_back(check);
    return test_error_of(own.coefficients(), own.b, fit.spec);
  }

  const ExperimentConfig& cfg_;
  Prepared p_;
  JobRecord& rec_;
  std::vector<std::string>& log_;
  std::vector<KernelSpec> specs_;
  GramCache cache_;
  std::vector<double> Cs_;
  std::optional<std::pair<double, Candidate>> svm_;
  std::optional<SvmPlusFit> svmplus_;
};

Prepared prepare(const ExperimentConfig& cfg, const Sources& src, const Split& split) {
  Prepared p;
  Dataset train = src.pool.data.subset(split.train_rows);
  Dataset validation = src.validation ? *src.validation : src.pool.data.subset(split.validation_rows);
  Dataset test = src.test;
  if (cfg.rescale) {
    auto [scaled, map] = rescale_features(train);
    train = std::move(scaled);
    validation = map.apply(validation);
    test = map.apply(test);
  }
  if (src.pool.priv) {
    const PrivilegedSet priv = src.pool.priv->subset(split.train_rows);
    if (cfg.rescale) {
      p.priv = PrivilegedSet(rescale_features(Dataset(priv.x(), train.y())).first.x());
    } else {
      p.priv = priv;
    }
  }
  if (src.pool.eta) {
    Vector eta(static_cast<Eigen::Index>(split.train_rows.size()));
    for (std::size_t k = 0; k < split.train_rows.size(); ++k) eta[static_cast<Eigen::Index>(k)] = (*src.pool.eta)[split.train_rows[k]];
    p.eta = std::move(eta);
  }
  p.train = std::move(train);
  p.validation = std::move(validation);
  p.test = std::move(test);
  return p;
}

bool both_classes(const Dataset& d, const std::vector<Eigen::Index>& rows) {
  bool plus = false;
  bool minus = false;
  for (Eigen::Index r : rows) (d.y()[r] > 0 ? plus : minus) = true;
  return plus && minus;
}

Split draw_split(const ExperimentConfig& cfg, const Sources& src, Eigen::Index subset, std::mt19937_64& rng,
                 std::size_t& resamples) {
  const Eigen::Index pool = src.pool.data.size();
  if (subset > pool) throw InvalidInput("experiment: subset size exceeds the training pool");
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(pool));
  for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(rows.begin(), rows.end(), rng);
    Split s;
    Eigen::Index n_train = subset;
    if (cfg.split == SplitMode::one_to_two) n_train = std::max<Eigen::Index>(2, subset / 3);
    if (cfg.split == SplitMode::two_to_one) n_train = std::max<Eigen::Index>(2, (2 * subset) / 3);
    s.train_rows.assign(rows.begin(), rows.begin() + n_train);
    if (cfg.split != SplitMode::fixed_validation) s.validation_rows.assign(rows.begin() + n_train, rows.begin() + subset);
    std::sort(s.train_rows.begin(), s.train_rows.end());
    std::sort(s.validation_rows.begin(), s.validation_rows.end());
    const bool ok = both_classes(src.pool.data, s.train_rows) &&
                    (cfg.split == SplitMode::fixed_validation || !s.validation_rows.empty());
    if (ok) return s;
    ++resamples;
  }
  throw InvalidInput("experiment: could not draw a subset containing both classes");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_double(tok));
  }
  return out;
}

std::vector<std::string> parse_words(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

KernelKind parse_kind(const std::string& text) {
  if (text == "linear") return KernelKind::linear;
  if (text == "rbf") return KernelKind::rbf;
  throw InvalidInput("unknown kernel kind '" + text + "'");
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidInput("expected a boolean, got '" + text + "'");
}

}  // namespace

std::string to_string(SplitMode mode) {
  switch (mode) {
    case SplitMode::fixed_validation:
      return "fixed";
    case SplitMode::one_to_two:
      return "1-to-2";
    case SplitMode::two_to_one:
      return "2-to-1";
  }
  return "unknown";
}

SplitMode parse_split_mode(const std::string& text) {
  if (text == "fixed" || text == "fixed-validation") return SplitMode::fixed_validation;
  if (text == "1-to-2") return SplitMode::one_to_two;
  if (text == "2-to-1") return SplitMode::two_to_one;
  throw InvalidInput("unknown split mode '" + text + "'");
}

std::vector<double> default_log_grid() {
  std::vector<double> g;
  for (int e = -5; e <= 15; e += 2) g.push_back(std::ldexp(1.0, e));
  return g;
}

void apply_key_values(ExperimentConfig& c, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "source") {
      c.source = value;
    } else if (key == "train") {
      c.train_path = value;
    } else if (key == "test") {
      c.test_path = value;
    } else if (key == "validation") {
      c.validation_path = value;
    } else if (key == "privileged") {
      c.privileged_path = value;
    } else if (key == "scores") {
      c.scores_path = value;
    } else if (key == "pool_size") {
      c.pool_size = std::stol(value);
    } else if (key == "test_size") {
      c.test_size = std::stol(value);
    } else if (key == "validation_size") {
      c.validation_size = std::stol(value);
    } else if (key == "w_sigma") {
      c.w_sigma = parse_double(value);
    } else if (key == "blob_per_class") {
      c.blobs.per_class = std::stol(value);
    } else if (key == "blob_outliers") {
      c.blobs.outliers = std::stol(value);
    } else if (key == "blob_distance") {
      c.blobs.outlier_distance = parse_double(value);
    } else if (key == "blob_spread") {
      c.blobs.spread = parse_double(value);
    } else if (key == "split") {
      c.split = parse_split_mode(value);
    } else if (key == "subsets") {
      c.subset_sizes.clear();
      for (double v : parse_list(value)) c.subset_sizes.push_back(static_cast<Eigen::Index>(v));
    } else if (key == "repetitions") {
      c.repetitions = std::stoul(value);
    } else if (key == "seed") {
      c.seed = std::stoull(value);
    } else if (key == "methods") {
      c.methods = parse_words(value);
    } else if (key == "kernel") {
      c.kernel = parse_kind(value);
    } else if (key == "priv_kernel") {
      c.priv_kernel = parse_kind(value);
    } else if (key == "grid_C") {
      c.grids.C = parse_list(value);
    } else if (key == "grid_gamma") {
      c.grids.gamma = parse_list(value);
    } else if (key == "grid_tau") {
      c.grids.tau = parse_list(value);
    } else if (key == "grid_delta") {
      c.learning.delta_grid = parse_list(value);
    } else if (key == "quantiles") {
      c.grids.quantiles = parse_list(value);
    } else if (key == "bandwidths") {
      c.grids.bandwidths = parse_list(value);
    } else if (key == "priv_bandwidths") {
      c.grids.priv_bandwidths = parse_list(value);
    } else if (key == "eta_source") {
      c.eta_source = value;
    } else if (key == "nw_bandwidth") {
      c.nw_bandwidth = parse_double(value);
    } else if (key == "rescale") {
      c.rescale = parse_bool(value);
    } else if (key == "tol") {
      c.tol = parse_double(value);
    } else if (key == "learn_max_iter") {
      c.learning.max_iter = std::stoul(value);
    } else if (key == "learn_grad_tol") {
      c.learning.grad_tol = parse_double(value);
    } else if (key == "learn_mode") {
      if (value == "log") {
        c.learning.mode = NonnegativityMode::log_weights;
      } else if (value == "projected") {
        c.learning.mode = NonnegativityMode::projected;
      } else {
        throw InvalidInput("unknown learn_mode '" + value + "'");
      }
    } else {
      throw InvalidInput("unknown configuration key '" + key + "'");
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw InvalidInput("experiment: repetitions must be at least 1");
  if (cfg.subset_sizes.empty()) throw InvalidInput("experiment: no subset sizes");
  for (const std::string& m : cfg.methods) {
    if (std::find(kMethods.begin(), kMethods.end(), m) == kMethods.end()) {
      throw InvalidInput("experiment: unknown method '" + m + "'");
    }
  }
  const Eigen::Index largest = *std::max_element(cfg.subset_sizes.begin(), cfg.subset_sizes.end());
  const Eigen::Index validation_size = cfg.validation_size > 0 ? cfg.validation_size : 10 * largest;
  const Sources src = load_sources(cfg, validation_size);

  ExperimentResult out;
  for (std::size_t si = 0; si < cfg.subset_sizes.size(); ++si) {
    const Eigen::Index subset = cfg.subset_sizes[si];
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      JobRecord rec;
      rec.subset = subset;
      rec.rep = rep;
      rec.seed = derive_seed(cfg.seed, si, rep);
      std::mt19937_64 rng(rec.seed);
      const Split split = draw_split(cfg, src, subset, rng, rec.resamples);
      if (rec.resamples > 0) {
        out.log.push_back("subset " + std::to_string(subset) + " rep " + std::to_string(rep) + ": resampled " +
                          std::to_string(rec.resamples) + " single-class draws");
      }
      Prepared p = prepare(cfg, src, split);
      rec.train_ids = p.train.ids();
      rec.validation_ids = p.validation.ids();
      rec.test_ids = p.test.ids();
      Job job(cfg, std::move(p), rec, out.log);
      job.run(out.replication);
      out.jobs.push_back(std::move(rec));
    }
    for (const std::string& method : cfg.methods) {
      ResultRow row;
      row.method = method;
      row.subset = subset;
      row.split = to_string(cfg.split);
      std::vector<double> errs;
      for (const JobRecord& j : out.jobs) {
        if (j.subset == subset) errs.push_back(j.test_error.at(method));
      }
      row.reps = errs.size();
      const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(errs.size());
      double var = 0.0;
      for (double e : errs) var += (e - mean) * (e - mean);
      row.mean_error = mean;
      row.std = std::sqrt(var / static_cast<double>(errs.size()));
      out.table.push_back(row);
    }
  }
  return out;
}

void write_results(std::ostream& out, const ResultTable& table) {
  out << "method,subset,split,mean_error,std,reps\n";
  for (const ResultRow& r : table) {
    out << r.method << ',' << r.subset << ',' << r.split << ',' << format_significant(r.mean_error, 6) << ','
        << format_significant(r.std, 6) << ',' << r.reps << '\n';
  }
}

void emit_results(const ResultTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write results to '" + path + "'");
  write_results(out, table);
  if (!out) throw InvalidInput("failed writing results to '" + path + "'");
}

ResultTable parse_results(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line) || line != "method,subset,split,mean_error,std,reps") {
    throw InvalidInput("results file has an unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 6) throw InvalidInput("results row must have 6 fields: " + line);
    table.push_back({f[0], std::stol(f[1]), f[2], parse_double(f[3]), parse_double(f[4]), std::stoul(f[5])});
  }
  return table;
}

void write_replication(std::ostream& out, const std::vector<ReplicationCheck>& checks) {
  out << "subset,rep,agreement,rkhs_difference,max_decision_difference\n";
  for (const ReplicationCheck& c : checks) {
    out << c.subset << ',' << c.rep << ',' << format_significant(c.agreement, 6) << ','
        << format_significant(c.rkhs_difference, 6) << ',' << format_significant(c.max_decision_difference, 6) << '\n';
  }
}

std::vector<OutlierTrial> run_outlier_study(const OutlierStudy& study) {
  std::vector<OutlierTrial> trials;
  WsvmOptions opts;
  for (std::size_t rep = 0; rep < study.repetitions; ++rep) {
    BlobConfig train_cfg = study.blobs;
    train_cfg.seed = derive_seed(study.seed, rep, 1);
    const GeneratedSample train = generate_blobs_with_outliers(train_cfg);
    BlobConfig test_cfg = study.blobs;
    test_cfg.seed = derive_seed(study.seed, rep, 2);
    test_cfg.outliers = 0;
    test_cfg.per_class = study.test_per_class;
    const GeneratedSample test = generate_blobs_with_outliers(test_cfg);

    const KernelSpec spec = KernelSpec::linear();
    const Matrix K = gram(spec, train.data.x());
    const Vector plain = Vector::Constant(train.data.size(), study.C);
    Vector zeroed = plain;
    for (std::size_t i = 0; i < train.planted.size(); ++i) {
      if (train.planted[i]) zeroed[static_cast<Eigen::Index>(i)] = 0.0;
    }
    const WsvmModel svm = solve_wsvm(train.data, spec, K, plain, opts);
    const WsvmModel wsvm = solve_wsvm(train.data, spec, K, zeroed, opts);
    trials.push_back({rep, error_rate(predict(svm, test.data.x()), test.data.y()),
                      error_rate(predict(wsvm, test.data.x()), test.data.y())});
  }
  return trials;
}

void write_outlier_trials(std::ostream& out, const std::vector<OutlierTrial>& trials) {
  out << "rep,svm_error,wsvm_error\n";
  for (const OutlierTrial& t : trials) {
    out << t.rep << ',' << format_significant(t.svm_error, 6) << ',' << format_significant(t.wsvm_error, 6) << '\n';
  }
}

}  // namespace lupi
