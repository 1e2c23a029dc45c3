#include "stgarch/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stgarch/selection.hpp"

namespace stgarch {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int n_scalar_params(const ModelSpec& spec) {
  int n = 1 + spec.p + spec.q + 1 + 1 + spec.s + spec.r + 2 + 1;  // all blocks
  return n;
}

}  // namespace

Eigen::VectorXd ingest_returns(const std::string& path, const std::string& column,
                               ReturnsTransform transform) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path, 0);
  std::string line;
  int lineno = 0;
  do {  // manifest comment lines may precede the header
    if (!std::getline(in, line)) throw DataError("empty file", lineno);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  } while (line.empty() || line[0] == '#');
  const auto header = split_csv_line(line);
  int col = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    if (header[i] == column) col = i;
  if (col < 0) throw DataError("column not found: " + column, lineno);

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (col >= static_cast<int>(cells.size()))
      throw DataError("missing cell", lineno);
    double v;
    if (!parse_double(cells[col], v))
      throw DataError("non-numeric cell '" + cells[col] + "'", lineno);
    if (transform == ReturnsTransform::LogReturn && !(v > 0.0))
      throw DataError("non-positive price under log_return", lineno);
    values.push_back(v);
  }
  if (transform == ReturnsTransform::None)
    return Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
  if (values.size() < 2) throw DataError("need at least two prices", lineno);
  Eigen::VectorXd r(values.size() - 1);
  for (size_t i = 1; i < values.size(); ++i)
    r[i - 1] = 100.0 * std::log(values[i] / values[i - 1]);
  return r;
}

Config load_config(const std::string& path) {
  Config cfg;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path, 0);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw DataError("bad config line", lineno);
    cfg[key] = val;
  }
  return cfg;
}

void apply_override(Config& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw DataError("override must be key=value: " + kv, 0);
  cfg[kv.substr(0, eq)] = kv.substr(eq + 1);
}

namespace {

std::string get_or(const Config& cfg, const std::string& key,
                   const std::string& def) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? def : it->second;
}

}  // namespace

ModelSpec spec_from_config(const Config& cfg) {
  ModelSpec spec;
  spec.p = std::stoi(get_or(cfg, "spec.p", "0"));
  spec.q = std::stoi(get_or(cfg, "spec.q", "0"));
  spec.r = std::stoi(get_or(cfg, "spec.r", "1"));
  spec.s = std::stoi(get_or(cfg, "spec.s", "1"));
  const std::string fam = get_or(cfg, "spec.error_family", "gaussian");
  if (fam == "gaussian") spec.error_family = ErrorFamily::Gaussian;
  else if (fam == "student_t") spec.error_family = ErrorFamily::StudentT;
  else throw DataError("unknown spec.error_family " + fam, 0);
  const std::string tr = get_or(cfg, "spec.transition", "none");
  if (tr == "none") spec.transition = Transition::None;
  else if (tr == "exponential") spec.transition = Transition::Exponential;
  else if (tr == "logistic") spec.transition = Transition::Logistic;
  else if (tr == "logistic2") spec.transition = Transition::Logistic2;
  else throw DataError("unknown spec.transition " + tr, 0);
  spec.include_m_term = get_or(cfg, "spec.include_m_term", "false") == "true";
  if (!spec.valid()) throw DataError("invalid model spec", 0);
  return spec;
}

PriorConfig prior_from_config(const Config& cfg) {
  PriorConfig prior;
  prior.gamma0 = std::stod(get_or(cfg, "prior.gamma0", "5"));
  const std::string np = get_or(cfg, "prior.nu", "jeffreys");
  if (np == "jeffreys") prior.nu_prior = NuPrior::IndependentJeffreys;
  else if (np == "exponential") prior.nu_prior = NuPrior::Exponential;
  else throw DataError("unknown prior.nu " + np, 0);
  prior.nu_exp_rate = std::stod(get_or(cfg, "prior.nu_exp_rate", "0.1"));
  prior.nu_max = std::stod(get_or(cfg, "prior.nu_max", "0"));
  return prior;
}

McmcConfig mcmc_from_config(const Config& cfg) {
  McmcConfig mc;
  mc.iterations = std::stoi(get_or(cfg, "mcmc.iterations", "6000"));
  mc.burn_in = std::stoi(get_or(cfg, "mcmc.burn_in", "2000"));
  mc.thin = std::stoi(get_or(cfg, "mcmc.thin", "1"));
  mc.seed = std::stoull(get_or(cfg, "mcmc.seed", "1"));
  mc.scale_variance = std::stod(get_or(cfg, "mcmc.scale_variance", "0.25"));
  mc.scale_nu = std::stod(get_or(cfg, "mcmc.scale_nu", "0.6"));
  if (mc.burn_in >= mc.iterations) throw DataError("burn_in >= iterations", 0);
  return mc;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string chain_to_csv(const Chain& chain) {
  const ModelSpec& spec = chain.spec;
  std::ostringstream os;
  os << "mu";
  for (int j = 0; j < spec.p; ++j) os << ",phi" << j + 1;
  for (int j = 0; j < spec.q; ++j) os << ",theta" << j + 1;
  os << ",delta,omega";
  for (int j = 0; j < spec.s; ++j) os << ",alpha" << j + 1;
  for (int j = 0; j < spec.r; ++j) os << ",beta" << j + 1;
  os << ",lambda,gamma,nu,loglik\n";
  for (size_t i = 0; i < chain.draws.size(); ++i) {
    const ParamState& st = chain.draws[i];
    os << fmt(st.mu);
    for (int j = 0; j < spec.p; ++j) os << "," << fmt(st.phi[j]);
    for (int j = 0; j < spec.q; ++j) os << "," << fmt(st.theta[j]);
    os << "," << fmt(st.delta) << "," << fmt(st.omega0);
    for (int j = 0; j < spec.s; ++j) os << "," << fmt(st.alpha[j]);
    for (int j = 0; j < spec.r; ++j) os << "," << fmt(st.beta[j]);
    os << "," << fmt(st.lambda) << "," << fmt(st.gamma) << "," << fmt(st.nu)
       << "," << fmt(chain.logliks[i]) << "\n";
  }
  return os.str();
}

Chain chain_from_csv(const std::string& csv, const ModelSpec& spec) {
  Chain chain;
  chain.spec = spec;
  std::istringstream in(csv);
  std::string line;
  do {  // skip manifest comments, then the header
    if (!std::getline(in, line)) return chain;
  } while (!line.empty() && line[0] == '#');
  std::vector<double> lls;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != n_scalar_params(spec) + 1)
      throw DataError("chain row width mismatch", 0);
    int k = 0;
    ParamState st;
    auto next = [&] { return std::stod(cells[k++]); };
    st.mu = next();
    st.phi.resize(spec.p);
    for (int j = 0; j < spec.p; ++j) st.phi[j] = next();
    st.theta.resize(spec.q);
    for (int j = 0; j < spec.q; ++j) st.theta[j] = next();
    st.delta = next();
    st.omega0 = next();
    st.alpha.resize(spec.s);
    for (int j = 0; j < spec.s; ++j) st.alpha[j] = next();
    st.beta.resize(spec.r);
    for (int j = 0; j < spec.r; ++j) st.beta[j] = next();
    st.lambda = next();
    st.gamma = next();
    st.nu = next();
    lls.push_back(next());
    chain.draws.push_back(std::move(st));
  }
  chain.logliks = Eigen::Map<Eigen::VectorXd>(lls.data(), lls.size());
  return chain;
}

namespace {

nlohmann::json param_summary(std::vector<double> v) {
  nlohmann::json j;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  std::sort(v.begin(), v.end());
  auto quant = [&](double q) {
    const double pos = q * (v.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  j["mean"] = mean;
  j["median"] = quant(0.5);
  j["ci95"] = {quant(0.025), quant(0.975)};
  return j;
}

}  // namespace

std::string summarize_chain(const Chain& chain, const Config& resolved,
                            std::uint64_t seed) {
  const ModelSpec& spec = chain.spec;
  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["config"] = resolved;
  j["n_draws"] = chain.draws.size();

  auto collect = [&](auto&& get) {
    std::vector<double> v(chain.draws.size());
    for (size_t i = 0; i < chain.draws.size(); ++i) v[i] = get(chain.draws[i]);
    return v;
  };
  nlohmann::json params;
  params["mu"] = param_summary(collect([](const ParamState& s) { return s.mu; }));
  for (int k = 0; k < spec.p; ++k)
    params["phi" + std::to_string(k + 1)] =
        param_summary(collect([k](const ParamState& s) { return s.phi[k]; }));
  for (int k = 0; k < spec.q; ++k)
    params["theta" + std::to_string(k + 1)] =
        param_summary(collect([k](const ParamState& s) { return s.theta[k]; }));
  params["delta"] = param_summary(collect([](const ParamState& s) { return s.delta; }));
  params["omega"] = param_summary(collect([](const ParamState& s) { return s.omega0; }));
  for (int k = 0; k < spec.s; ++k)
    params["alpha" + std::to_string(k + 1)] =
        param_summary(collect([k](const ParamState& s) { return s.alpha[k]; }));
  for (int k = 0; k < spec.r; ++k)
    params["beta" + std::to_string(k + 1)] =
        param_summary(collect([k](const ParamState& s) { return s.beta[k]; }));
  if (spec.transition != Transition::None) {
    params["lambda"] = param_summary(collect([](const ParamState& s) { return s.lambda; }));
    params["gamma"] = param_summary(collect([](const ParamState& s) { return s.gamma; }));
  }
  if (spec.error_family == ErrorFamily::StudentT)
    params["nu"] = param_summary(collect([](const ParamState& s) { return s.nu; }));
  j["params"] = params;
  j["acceptance"] = chain.acceptance;

  int n_params = 2 + spec.p + spec.q + spec.s + spec.r;  // mu, omega + coefs
  if (spec.include_m_term) ++n_params;
  if (spec.transition != Transition::None) n_params += 2;
  if (spec.error_family == ErrorFamily::StudentT) ++n_params;
  if (chain.logliks.size() >= 100) {
    const auto nr = newton_raftery(chain.logliks);
    const auto sg = shifted_gamma(chain.logliks, n_params);
    j["log_marginal"]["newton_raftery"] = nr.log_value;
    j["log_marginal"]["newton_raftery_converged"] = nr.converged;
    j["log_marginal"]["shifted_gamma"] = sg.log_value;
  }
  return j.dump(2) + "\n";
}

Eigen::MatrixXd likelihood_surface(const Eigen::VectorXd& y, const ModelSpec& spec,
                                   const ParamState& base_state,
                                   const Eigen::VectorXd& grid_gamma,
                                   const Eigen::VectorXd& grid_nu) {
  Eigen::MatrixXd out(grid_gamma.size(), grid_nu.size());
  for (Eigen::Index i = 0; i < grid_gamma.size(); ++i)
    for (Eigen::Index j = 0; j < grid_nu.size(); ++j) {
      ParamState st = base_state;
      st.gamma = grid_gamma[i];
      st.nu = grid_nu[j];
      const FilterOutput f = filter(y, spec, st);
      out(i, j) = f.finite ? f.loglik : std::nan("");
    }
  return out;
}

Eigen::VectorXd standardized_residuals(const Eigen::VectorXd& y,
                                       const ModelSpec& spec,
                                       const ParamState& base_state) {
  ModelSpec g = spec;
  g.error_family = ErrorFamily::Gaussian;
  const FilterOutput f = filter(y, g, base_state);
  if (!f.finite)
    throw std::runtime_error("standardized_residuals: non-finite filter pass");
  return (f.u.array() / f.h.array().sqrt()).matrix();
}

}  // namespace stgarch
