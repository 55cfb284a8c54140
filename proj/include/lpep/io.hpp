#ifndef LPEP_IO_HPP_
#define LPEP_IO_HPP_

#include <string>

#include "lpep/dataset.hpp"
#include "lpep/inference.hpp"
#include "lpep/sampler.hpp"

namespace lpep {

struct RunConfig {
  std::string input_path;
  std::string response_column = "y";  // name, or numeric 0-based index
  DeltaPriorKind delta_kind = DeltaPriorKind::FixedUnitInfo;
  double model_prior_a = 1.0;
  double model_prior_b = 1.0;
  long iterations = 131072;
  long burn_in = 10000;
  int chains = 1;
  std::uint64_t seed = 0;
  bool standardize = false;
  std::string output_path;  // empty = stdout
  std::string draw_log;     // optional CSV path
};

// RFC-4180-style CSV with a header row and '.' decimals. The response column
// is removed from the covariates; the intercept is prepended; optional
// standardization centers/scales the covariates (never the intercept).
Dataset load_csv(const std::string& path, const std::string& response_column,
                 bool standardize = false);

// Writes the response (named "y") followed by the covariate columns.
void write_dataset_csv(const std::string& path, const Dataset& data);

// Covariate-mask rendering used in JSON summaries and draw logs: decimal for
// p <= 64, "hi:lo" hex pair above that. Low bit = first covariate.
std::string format_gamma_bits(const ModelIndicator::Key& key, int p);

std::string summary_to_json(const PosteriorSummary& summary, const DrawStore& draws);

// CSV with header iter,delta,gamma_bits,beta_0,...,beta_p (excluded
// coefficients written as 0); iter counts post-burn-in records from 1.
void write_draw_log(const std::string& path, const DrawStore& draws);

// Runs `chains` chains (stream ids 0..chains-1) across worker threads capped
// by LPEP_THREADS, then merges deterministically in chain order.
DrawStore run_chains(const Dataset& data, const McmcConfig& config, int chains);

int cli_main(int argc, char** argv);

}  // namespace lpep

#endif  // LPEP_IO_HPP_
