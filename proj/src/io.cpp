#include "lpep/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace lpep {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

double parse_cell(const std::string& cell, int row, const std::string& col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used != cell.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError("load_csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                    ", column " + col);
  }
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& response_column, bool standardize) {
  std::ifstream in(path);
  if (!in) throw DataError("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("load_csv: empty file " + path);
  const std::vector<std::string> header = split_csv_line(line);
  const int ncol = static_cast<int>(header.size());
  if (ncol < 2) throw DataError("load_csv: need a response and at least one covariate");

  int resp = -1;
  for (int j = 0; j < ncol; ++j)
    if (header[j] == response_column) resp = j;
  if (resp < 0) {
    try {
      const int idx = std::stoi(response_column);
      if (idx >= 0 && idx < ncol) resp = idx;
    } catch (const std::exception&) {
    }
  }
  if (resp < 0)
    throw DataError("load_csv: response column '" + response_column + "' not found in " + path);

  std::vector<double> yraw;
  std::vector<std::vector<double>> cols(ncol - 1);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != ncol)
      throw DataError("load_csv: row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " fields, expected " + std::to_string(ncol));
    int c = 0;
    for (int j = 0; j < ncol; ++j) {
      const double v = parse_cell(cells[j], row, header[j]);
      if (j == resp)
        yraw.push_back(v);
      else
        cols[c++].push_back(v);
    }
  }
  const int n = static_cast<int>(yraw.size());
  if (n == 0) throw DataError("load_csv: no data rows in " + path);

  BinaryVector y(n);
  for (int i = 0; i < n; ++i) {
    if (yraw[i] == 0.0)
      y[i] = 0;
    else if (yraw[i] == 1.0)
      y[i] = 1;
    else
      throw DataError("load_csv: response column '" + header[resp] + "' must be 0/1, got " +
                      std::to_string(yraw[i]) + " at row " + std::to_string(i + 2));
  }

  Matrix C(n, ncol - 1);
  for (int j = 0; j < ncol - 1; ++j)
    for (int i = 0; i < n; ++i) C(i, j) = cols[j][i];

  if (standardize) {
    for (int j = 0; j < C.cols(); ++j) {
      const double mean = C.col(j).mean();
      const double sd = std::sqrt((C.col(j).array() - mean).square().sum() / (n - 1));
      if (sd <= 0.0)
        throw DataError("load_csv: cannot standardize constant column '" +
                        header[j + (j >= resp ? 1 : 0)] + "'");
      C.col(j) = (C.col(j).array() - mean) / sd;
    }
  }

  std::vector<std::string> names;
  for (int j = 0; j < ncol; ++j)
    if (j != resp) names.push_back(header[j]);
  return make_dataset(y, C, std::move(names));
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("write_dataset_csv: cannot open " + path);
  out << "y";
  for (int j = 1; j <= data.p(); ++j) out << "," << data.column_names[j];
  out << "\n";
  out.precision(17);
  for (int i = 0; i < data.n(); ++i) {
    out << data.y[i];
    for (int j = 1; j <= data.p(); ++j) out << "," << data.X(i, j);
    out << "\n";
  }
}

std::string format_gamma_bits(const ModelIndicator::Key& key, int p) {
  if (p <= 64) return std::to_string(key.w0);
  std::ostringstream os;
  os << std::hex << key.w1 << ":" << key.w0;
  return os.str();
}

std::string summary_to_json(const PosteriorSummary& summary, const DrawStore& draws) {
  nlohmann::json j;
  j["pips"] = std::vector<double>(summary.pip.data(), summary.pip.data() + summary.pip.size());
  nlohmann::json models = nlohmann::json::array();
  for (const auto& [key, prob] : summary.top_models)
    models.push_back({{"bits", format_gamma_bits(key, draws.p)}, {"prob", prob}});
  j["models"] = models;
  std::vector<int> map_gamma;
  for (int jx = 1; jx <= summary.map_model.p(); ++jx)
    map_gamma.push_back(summary.map_model.includes(jx) ? 1 : 0);
  j["map"] = {{"bits", format_gamma_bits(summary.map_model.key(), draws.p)},
              {"prob", summary.top_models.front().second},
              {"gamma", map_gamma}};
  j["bma"] = {
      {"mean", std::vector<double>(summary.bma_mean.data(),
                                   summary.bma_mean.data() + summary.bma_mean.size())},
      {"lo", std::vector<double>(summary.ci_lower.data(),
                                 summary.ci_lower.data() + summary.ci_lower.size())},
      {"hi", std::vector<double>(summary.ci_upper.data(),
                                 summary.ci_upper.data() + summary.ci_upper.size())}};
  j["delta_mean"] = summary.mean_delta;
  j["mean_model_size"] = summary.mean_model_size;
  j["acceptance"] = {{"model_delta", draws.accept_rate_model_delta()},
                     {"ystar_local", draws.counters.ystar_local_proposed
                                         ? double(draws.counters.ystar_local_accepted) /
                                               draws.counters.ystar_local_proposed
                                         : 0.0},
                     {"ystar_global", draws.counters.ystar_global_proposed
                                          ? double(draws.counters.ystar_global_accepted) /
                                                draws.counters.ystar_global_proposed
                                          : 0.0},
                     {"delta_extra", draws.counters.delta_extra_proposed
                                         ? double(draws.counters.delta_extra_accepted) /
                                               draws.counters.delta_extra_proposed
                                         : 0.0}};
  j["numeric_failures"] = draws.counters.numeric_failures;
  j["draws"] = draws.size();
  return j.dump(2);
}

void write_draw_log(const std::string& path, const DrawStore& draws) {
  std::ofstream out(path);
  if (!out) throw DataError("write_draw_log: cannot open " + path);
  out << "iter,delta,gamma_bits";
  for (int j = 0; j <= draws.p; ++j) out << ",beta_" << j;
  out << "\n";
  out.precision(17);
  for (long t = 0; t < draws.size(); ++t) {
    out << (t + 1) << "," << draws.delta[t] << "," << format_gamma_bits(draws.gamma[t], draws.p);
    for (int j = 0; j <= draws.p; ++j) out << "," << draws.beta[t * (draws.p + 1) + j];
    out << "\n";
  }
}

DrawStore run_chains(const Dataset& data, const McmcConfig& config, int chains) {
  if (chains < 1) throw ConfigError("run_chains: chains must be >= 1");
  data.fingerprint();  // precompute before sharing across threads
  std::vector<DrawStore> stores(chains);
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LPEP_THREADS")) {
    const long cap = std::atol(env);
    if (cap >= 1 && cap < static_cast<long>(hw)) hw = static_cast<unsigned>(cap);
  }
  const int workers = static_cast<int>(std::min<unsigned>(hw, chains));
  if (workers <= 1) {
    for (int c = 0; c < chains; ++c) stores[c] = run_chain(data, config, c);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (int c = w; c < chains; c += workers) stores[c] = run_chain(data, config, c);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return DrawStore::merge(stores);
}

}  // namespace lpep
