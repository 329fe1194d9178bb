#include "favar/draws_io.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <openssl/evp.h>

#include "favar/csv.hpp"

namespace favar {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot hash " + path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    EVP_DigestUpdate(ctx, buf, static_cast<size_t>(in.gcount()));
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

namespace {

const char* kBlockFiles[] = {
    "lambda_out.csv",   "lambda_inf.csv",  "lambda_z_out.csv",
    "lambda_z_inf.csv", "h_out.csv",       "h_inf.csv",
    "h0_out.csv",       "h0_inf.csv",      "lam_h_out.csv",
    "lam_h_inf.csv",    "nu_lam_out.csv",  "nu_lam_inf.csv",
    "horseshoe_scalars.csv", "factors.csv", "presample.csv",
    "var_a.csv",        "var_b.csv",       "scalars.csv"};

void write_block(const std::string& dir, const std::string& name,
                 const PosteriorDraws& draws,
                 const std::function<void(const McmcState&, std::vector<double>&)>& fill,
                 const std::function<void(std::vector<std::string>&)>& header) {
  std::ofstream out(fs::path(dir) / name);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + name);
  std::vector<std::string> names;
  header(names);
  out << "draw";
  for (const auto& c : names) out << ',' << c;
  out << '\n';
  std::vector<double> row;
  for (int d = 0; d < draws.size(); ++d) {
    row.clear();
    fill(draws.states[d], row);
    if (row.size() != names.size())
      throw Error(ErrorCode::IoError, name + ": column mismatch");
    out << draws.draw_indices[d];
    for (double v : row) out << ',' << format_double(v);
    out << '\n';
  }
}

void matrix_header(std::vector<std::string>& names, const std::string& stem,
                   int rows, int cols) {
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      names.push_back(stem + "_r" + std::to_string(i) + "c" + std::to_string(j));
}

void push_matrix(std::vector<double>& row, const MatrixXd& m) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i) row.push_back(m(i, j));
}

MatrixXd pop_matrix(const VectorXd& row, int& pos, int rows, int cols) {
  MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = row(pos++);
  return m;
}

}  // namespace

void save_draws(const std::string& dir, const PosteriorDraws& draws,
                const ModelSpec& spec, const PriorConfig& priors,
                const std::map<std::string, std::string>& extra) {
  fs::create_directories(dir);
  if (draws.empty())
    throw Error(ErrorCode::EmptyDraws, "no retained draws to persist");
  const McmcState& s0 = draws.states.front();
  const int T = static_cast<int>(s0.factors.rows());
  const int N1 = static_cast<int>(s0.lambda_out.rows());
  const int P1 = static_cast<int>(s0.lambda_out.cols());
  const int nzP = static_cast<int>(s0.lambda_z_out.cols());
  const int q1 = static_cast<int>(s0.presample.rows());
  const int r = static_cast<int>(s0.presample.cols());
  const int K = static_cast<int>(s0.A.rows());
  const int n = static_cast<int>(s0.A.cols());

  const auto mat_block = [&](const std::string& file, const std::string& stem,
                             int rows, int cols, auto getter) {
    write_block(dir, file, draws,
                [&](const McmcState& s, std::vector<double>& row) {
                  push_matrix(row, getter(s));
                },
                [&](std::vector<std::string>& names) {
                  matrix_header(names, stem, rows, cols);
                });
  };

  mat_block("lambda_out.csv", "lam", N1, P1,
            [](const McmcState& s) { return s.lambda_out; });
  mat_block("lambda_inf.csv", "lam", N1, P1,
            [](const McmcState& s) { return s.lambda_inf; });
  mat_block("lambda_z_out.csv", "lamz", N1, nzP,
            [](const McmcState& s) { return s.lambda_z_out; });
  mat_block("lambda_z_inf.csv", "lamz", N1, nzP,
            [](const McmcState& s) { return s.lambda_z_inf; });
  mat_block("h_out.csv", "h", T, N1,
            [](const McmcState& s) { return s.h_out; });
  mat_block("h_inf.csv", "h", T, N1,
            [](const McmcState& s) { return s.h_inf; });
  mat_block("h0_out.csv", "h0", N1, 1, [](const McmcState& s) {
    return MatrixXd(s.h0_out);
  });
  mat_block("h0_inf.csv", "h0", N1, 1, [](const McmcState& s) {
    return MatrixXd(s.h0_inf);
  });
  mat_block("lam_h_out.csv", "lamh", T, N1,
            [](const McmcState& s) { return s.lam_h_out; });
  mat_block("lam_h_inf.csv", "lamh", T, N1,
            [](const McmcState& s) { return s.lam_h_inf; });
  mat_block("nu_lam_out.csv", "nulam", T, N1,
            [](const McmcState& s) { return s.nu_lam_out; });
  mat_block("nu_lam_inf.csv", "nulam", T, N1,
            [](const McmcState& s) { return s.nu_lam_inf; });
  write_block(dir, "horseshoe_scalars.csv", draws,
              [&](const McmcState& s, std::vector<double>& row) {
                for (int i = 0; i < N1; ++i) row.push_back(s.tau_h_out(i));
                for (int i = 0; i < N1; ++i) row.push_back(s.tau_h_inf(i));
                for (int i = 0; i < N1; ++i) row.push_back(s.nu_tau_out(i));
                for (int i = 0; i < N1; ++i) row.push_back(s.nu_tau_inf(i));
              },
              [&](std::vector<std::string>& names) {
                for (const char* stem : {"tau_out", "tau_inf", "nutau_out",
                                         "nutau_inf"})
                  for (int i = 0; i < N1; ++i)
                    names.push_back(std::string(stem) + "_s" + std::to_string(i));
              });
  mat_block("factors.csv", "f", T, 2,
            [](const McmcState& s) { return s.factors; });
  mat_block("presample.csv", "pre", q1, r,
            [](const McmcState& s) { return s.presample; });
  mat_block("var_a.csv", "a", K, n, [](const McmcState& s) { return s.A; });
  mat_block("var_b.csv", "b", n, n, [](const McmcState& s) { return s.B; });
  write_block(dir, "scalars.csv", draws,
              [&](const McmcState& s, std::vector<double>& row) {
                row.push_back(s.kappa1);
                row.push_back(s.kappa2);
                for (int i = 0; i < r; ++i) row.push_back(s.sigma_scale(i));
              },
              [&](std::vector<std::string>& names) {
                names.push_back("kappa1");
                names.push_back("kappa2");
                for (int i = 0; i < r; ++i)
                  names.push_back("sigma2_" + std::to_string(i));
              });

  json manifest;
  manifest["spec"] = json::parse(spec_to_json(spec));
  manifest["priors"] = json::parse(priors_to_json(priors));
  manifest["seed"] = draws.seed;
  manifest["retained"] = draws.size();
  manifest["dims"] = {{"T", T},   {"N1", N1}, {"P1", P1}, {"nzP", nzP},
                      {"q1", q1}, {"r", r},   {"K", K},   {"n", n}};
  json hashes;
  for (const char* f : kBlockFiles)
    hashes[f] = sha256_file((fs::path(dir) / f).string());
  manifest["content_hash"] = hashes;
  for (const auto& [k, val] : extra) manifest[k] = val;
  std::ofstream mf(fs::path(dir) / "manifest.json");
  mf << manifest.dump(2) << '\n';
}

LoadedDraws load_draws(const std::string& dir) {
  std::ifstream mf(fs::path(dir) / "manifest.json");
  if (!mf) throw Error(ErrorCode::IoError, "missing manifest.json in " + dir);
  json manifest = json::parse(mf);
  LoadedDraws out;
  out.spec = spec_from_json(manifest["spec"].dump());
  out.priors = priors_from_json(manifest["priors"].dump());
  out.draws.seed = manifest["seed"].get<std::uint64_t>();
  const auto& dims = manifest["dims"];
  const int T = dims["T"], N1 = dims["N1"], P1 = dims["P1"], nzP = dims["nzP"];
  const int q1 = dims["q1"], r = dims["r"], K = dims["K"], n = dims["n"];

  std::map<std::string, Table> tables;
  for (const char* f : kBlockFiles)
    tables.emplace(f, read_table((fs::path(dir) / f).string()));

  const int count = tables.at("factors.csv").rows();
  for (int d = 0; d < count; ++d) {
    McmcState s;
    int pos = 0;
    const auto row = [&](const char* f) -> VectorXd {
      pos = 0;
      return tables.at(f).values.row(d).transpose();
    };
    s.lambda_out = pop_matrix(row("lambda_out.csv"), pos, N1, P1);
    s.lambda_inf = pop_matrix(row("lambda_inf.csv"), pos, N1, P1);
    s.lambda_z_out = pop_matrix(row("lambda_z_out.csv"), pos, N1, nzP);
    s.lambda_z_inf = pop_matrix(row("lambda_z_inf.csv"), pos, N1, nzP);
    s.h_out = pop_matrix(row("h_out.csv"), pos, T, N1);
    s.h_inf = pop_matrix(row("h_inf.csv"), pos, T, N1);
    s.h0_out = pop_matrix(row("h0_out.csv"), pos, N1, 1);
    s.h0_inf = pop_matrix(row("h0_inf.csv"), pos, N1, 1);
    s.lam_h_out = pop_matrix(row("lam_h_out.csv"), pos, T, N1);
    s.lam_h_inf = pop_matrix(row("lam_h_inf.csv"), pos, T, N1);
    s.nu_lam_out = pop_matrix(row("nu_lam_out.csv"), pos, T, N1);
    s.nu_lam_inf = pop_matrix(row("nu_lam_inf.csv"), pos, T, N1);
    {
      const VectorXd hs = row("horseshoe_scalars.csv");
      s.tau_h_out = hs.segment(0, N1);
      s.tau_h_inf = hs.segment(N1, N1);
      s.nu_tau_out = hs.segment(2 * N1, N1);
      s.nu_tau_inf = hs.segment(3 * N1, N1);
    }
    s.factors = pop_matrix(row("factors.csv"), pos, T, 2);
    s.presample = pop_matrix(row("presample.csv"), pos, q1, r);
    s.A = pop_matrix(row("var_a.csv"), pos, K, n);
    s.B = pop_matrix(row("var_b.csv"), pos, n, n);
    {
      const VectorXd sc = row("scalars.csv");
      s.kappa1 = sc(0);
      s.kappa2 = sc(1);
      s.sigma_scale = sc.segment(2, r);
    }
    out.draws.states.push_back(std::move(s));
    out.draws.draw_indices.push_back(
        std::stoi(tables.at("factors.csv").dates[d]));
  }
  return out;
}

std::string dataset_content_hash(const std::string& dir) {
  json hashes;
  for (const char* f : {"x_out.csv", "x_inf.csv", "z.csv", "m.csv"}) {
    const auto p = fs::path(dir) / f;
    if (fs::exists(p)) hashes[f] = sha256_file(p.string());
  }
  return hashes.dump();
}

// --------------------------------------------------------------------- //
// spec / prior JSON
// --------------------------------------------------------------------- //

std::string spec_to_json(const ModelSpec& s) {
  json j;
  j["n_countries"] = s.n_countries;
  j["var_names_z"] = s.var_names_z;
  j["factor_lag_order"] = s.factor_lag_order;
  j["var_lag_order"] = s.var_lag_order;
  j["include_country_channels"] = s.include_country_channels;
  j["policy_rate_index"] = s.policy_rate_index;
  j["instrument_count"] = s.instrument_count;
  json sr = json::array();
  for (const auto& x : s.sign_restrictions)
    sr.push_back({{"variable", x.variable}, {"sign", x.sign}});
  j["sign_restrictions"] = sr;
  j["mcmc"] = {{"total_iterations", s.mcmc.total_iterations},
               {"burn_in", s.mcmc.burn_in},
               {"thinning", s.mcmc.thinning}};
  return j.dump();
}

ModelSpec spec_from_json(const std::string& text) {
  const json j = json::parse(text);
  ModelSpec s;
  s.n_countries = j.at("n_countries");
  s.var_names_z = j.at("var_names_z").get<std::vector<std::string>>();
  s.factor_lag_order = j.at("factor_lag_order");
  s.var_lag_order = j.at("var_lag_order");
  s.include_country_channels = j.at("include_country_channels");
  s.policy_rate_index = j.at("policy_rate_index");
  s.instrument_count = j.at("instrument_count");
  for (const auto& x : j.at("sign_restrictions"))
    s.sign_restrictions.push_back({x.at("variable"), x.at("sign")});
  s.mcmc.total_iterations = j.at("mcmc").at("total_iterations");
  s.mcmc.burn_in = j.at("mcmc").at("burn_in");
  s.mcmc.thinning = j.at("mcmc").at("thinning");
  return s;
}

std::string priors_to_json(const PriorConfig& p) {
  json j;
  j["loading_mean"] = p.loading_mean;
  j["loading_variance"] = p.loading_variance;
  j["z_loading_mean"] = p.z_loading_mean;
  j["z_loading_variance"] = p.z_loading_variance;
  j["impact_mean"] = p.impact_mean;
  j["impact_variance"] = p.impact_variance;
  j["proxy_relevance_mean"] = p.proxy_relevance_mean;
  j["proxy_relevance_variance"] = p.proxy_relevance_variance;
  j["proxy_noise_mean"] = p.proxy_noise_mean;
  j["proxy_noise_variance"] = p.proxy_noise_variance;
  j["constant_variance"] = p.constant_variance;
  j["sv_initial_variance"] = p.sv_initial_variance;
  j["state_init_variance"] = p.state_init_variance;
  j["kappa_max"] = p.kappa_max;
  j["fixed_kappa1"] = p.fixed_kappa1;
  j["fixed_kappa2"] = p.fixed_kappa2;
  json tags = json::array();
  for (const auto& t : p.extra_impact_tags)
    tags.push_back({{"row", t.row},
                    {"col", t.col},
                    {"tag", static_cast<int>(t.tag)}});
  j["extra_impact_tags"] = tags;
  return j.dump();
}

PriorConfig priors_from_json(const std::string& text) {
  const json j = json::parse(text);
  PriorConfig p;
  p.loading_mean = j.at("loading_mean");
  p.loading_variance = j.at("loading_variance");
  p.z_loading_mean = j.at("z_loading_mean");
  p.z_loading_variance = j.at("z_loading_variance");
  p.impact_mean = j.at("impact_mean");
  p.impact_variance = j.at("impact_variance");
  p.proxy_relevance_mean = j.at("proxy_relevance_mean");
  p.proxy_relevance_variance = j.at("proxy_relevance_variance");
  p.proxy_noise_mean = j.at("proxy_noise_mean");
  p.proxy_noise_variance = j.at("proxy_noise_variance");
  p.constant_variance = j.at("constant_variance");
  p.sv_initial_variance = j.at("sv_initial_variance");
  p.state_init_variance = j.at("state_init_variance");
  p.kappa_max = j.at("kappa_max");
  p.fixed_kappa1 = j.at("fixed_kappa1");
  p.fixed_kappa2 = j.at("fixed_kappa2");
  for (const auto& t : j.at("extra_impact_tags"))
    p.extra_impact_tags.push_back(
        {t.at("row"), t.at("col"),
         static_cast<Restriction>(t.at("tag").get<int>())});
  return p;
}

}  // namespace favar
