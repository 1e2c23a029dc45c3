#include "stgarch/forecast.hpp"

#include <cmath>
#include <stdexcept>

namespace stgarch {

double predict_variance(const Chain& chain, const Eigen::VectorXd& y,
                        const ModelSpec& spec) {
  if (chain.draws.empty())
    throw std::invalid_argument("predict_variance: empty chain");
  double sum = 0.0;
  int n_ok = 0;
  for (const ParamState& st : chain.draws) {
    const FilterOutput f = filter(y, spec, st);
    if (!f.finite) continue;
    const double h1 = one_step_variance(y, spec, st, f);
    if (!std::isfinite(h1)) continue;
    sum += h1;
    ++n_ok;
  }
  const double frac_bad =
      1.0 - static_cast<double>(n_ok) / static_cast<double>(chain.draws.size());
  if (frac_bad > 0.05)
    throw std::runtime_error("predict_variance: too many non-finite draws");
  return sum / n_ok;
}

std::vector<ForecastRecord> rolling_forecast(const Eigen::VectorXd& y_full,
                                             int split, const ModelSpec& spec,
                                             const PriorConfig& prior,
                                             const McmcConfig& mcmc,
                                             const std::string& model_tag,
                                             const RollingConfig& roll) {
  if (split <= spec.p + 30)
    throw std::invalid_argument("rolling_forecast: split too early");
  std::vector<ForecastRecord> records;
  for (int t = split; t < y_full.size(); ++t) {
    McmcConfig cfg = mcmc;
    cfg.seed = mcmc.seed + static_cast<std::uint64_t>(t);
    if (roll.refit_iterations > 0) {
      cfg.iterations = roll.refit_iterations;
      cfg.burn_in = roll.refit_iterations / 3;
    }
    const Eigen::VectorXd y = y_full.head(t);
    try {
      const Chain chain = run_chain(y, spec, prior, cfg);
      ForecastRecord rec;
      rec.t = t;
      rec.h_hat = predict_variance(chain, y, spec);
      rec.realized_proxy = y_full[t] * y_full[t];
      rec.model_tag = model_tag;
      records.push_back(rec);
    } catch (const std::exception&) {
      // per-step failure: skip the record, keep going
    }
  }
  return records;
}

std::vector<double> mse_ratio(const std::vector<ForecastRecord>& records_g,
                              const std::vector<ForecastRecord>& records_t,
                              int window) {
  if (records_g.size() != records_t.size())
    throw std::invalid_argument("mse_ratio: record sequences must align");
  const int n = static_cast<int>(records_g.size());
  if (n < window) throw std::invalid_argument("mse_ratio: fewer records than window");
  std::vector<double> out;
  for (int start = 0; start + window <= n; ++start) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < window; ++k) {
      const double eg = records_g[start + k].h_hat - records_g[start + k].realized_proxy;
      const double et = records_t[start + k].h_hat - records_t[start + k].realized_proxy;
      num += eg * eg;
      den += et * et;
    }
    out.push_back(den == 0.0 ? std::numeric_limits<double>::infinity() : num / den);
  }
  return out;
}

}  // namespace stgarch
