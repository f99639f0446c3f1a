#pragma once

// `ckls fit | cocycle | verify` command-line driver.
//
// Exit codes: 0 success, 1 input/parse error, 2 singular cell,
// 3 obstructed triple (cocycle), 4 verification failure.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ckls/cech.hpp"
#include "ckls/io.hpp"

namespace ckls::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kSingular = 2,
  kObstructed = 3,
  kVerifyFailed = 4,
};

enum class OutputFormat { json, text };

struct RunConfig {
  std::string dataset_path;
  std::optional<std::string> cover_path;
  std::optional<std::string> model_path;
  std::size_t max_overlap_degree = 2;
  OutputFormat output_format = OutputFormat::json;
  bool allow_negative_weights = false;
  std::optional<std::string> output_path;
  std::string cochain_path;  // verify only
};

namespace detail {

struct Inputs {
  Cover cover;
  FeatureMap features;
};

inline Inputs load_inputs(const RunConfig& cfg) {
  const auto policy =
      cfg.allow_negative_weights ? WeightPolicy::allow_negative : WeightPolicy::nonnegative;
  WeightedDataSet data = io::load_dataset(cfg.dataset_path, policy);
  FeatureMap features =
      cfg.model_path
          ? io::model_from_json(io::parse_json(io::read_file(*cfg.model_path), *cfg.model_path),
                                data.ambient_dim())
          : affine_features(data.ambient_dim());
  Cover cover = cfg.cover_path
                    ? io::cover_from_json(
                          io::parse_json(io::read_file(*cfg.cover_path), *cfg.cover_path),
                          std::move(data))
                    : Cover::whole(std::move(data));
  return {std::move(cover), std::move(features)};
}

inline void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
  if (cfg.output_path) {
    std::ofstream f(*cfg.output_path, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + *cfg.output_path + "'");
    f << body;
  } else {
    out << body;
  }
}

inline std::string vec_text(const RatVector& v) {
  std::string exact = "(";
  std::string approx = "(";
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (i) {
      exact += ", ";
      approx += ", ";
    }
    exact += v[i].to_string();
    approx += io::format_float(v[i].to_double());
  }
  return exact + ")  ~ " + approx + ")";
}

inline std::string indices_text(const IndexSet& s) {
  std::string t = "{";
  bool first = true;
  for (auto i : s) {
    if (!first) t += ",";
    t += std::to_string(i);
    first = false;
  }
  return t + "}";
}

inline std::string fit_text(const FitMap& fits) {
  std::ostringstream os;
  std::size_t top = 0;
  for (const auto& [names, fit] : fits) top = std::max(top, names.size());
  for (std::size_t size = 1; size <= top; ++size)
    for (const auto& [names, fit] : fits)
      if (names.size() == size)
        os << "cell " << cell_key(names) << "  indices " << indices_text(fit.cell.indices)
           << "  a_hat = " << vec_text(fit.solution.a_hat) << "\n";
  return os.str();
}

inline std::string cocycle_text(const CocycleResult& r) {
  std::ostringstream os;
  os << fit_text(r.fits);
  for (const auto& [names, p] : r.report.pairs) {
    os << "pair " << cell_key(names) << "  delta = " << vec_text(p.delta()) << "\n";
    os << "  beta = " << vec_text(ckls::detail::constant_part(r.cochain.beta.at(names)))
       << "  residual " << (p.residual_zero() ? "zero" : "NONZERO") << "\n";
  }
  for (const auto& [names, t] : r.report.triples) {
    os << "triple " << cell_key(names) << "  defect = " << vec_text(t.defect_constant) << "  "
       << to_string(t.outcome) << "\n";
  }
  os << (r.report.verified() ? "verified" : "NOT verified") << "\n";
  return os.str();
}

inline std::string report_text(const ObstructionReport& rep) {
  std::ostringstream os;
  for (const auto& [names, p] : rep.pairs)
    os << "pair " << cell_key(names) << "  residual "
       << (p.residual_zero() ? "zero" : "NONZERO " + io::to_json(p.residual).dump()) << "\n";
  for (const auto& [names, t] : rep.triples) {
    os << "triple " << cell_key(names) << "  " << to_string(t.outcome);
    if (t.residual && !t.residual->is_zero()) os << " " << io::to_json(*t.residual).dump();
    os << "\n";
  }
  os << (rep.verified() ? "verified" : "NOT verified") << "\n";
  return os.str();
}

inline nlohmann::json verify_json(const ObstructionReport& rep) {
  nlohmann::json pairs = nlohmann::json::object();
  nlohmann::json triples = nlohmann::json::object();
  for (const auto& [names, p] : rep.pairs)
    pairs[cell_key(names)] = {{"residual", io::to_json(p.residual)},
                              {"residual_zero", p.residual_zero()}};
  for (const auto& [names, t] : rep.triples)
    triples[cell_key(names)] = {
        {"defect_constant", io::to_json(t.defect_constant)},
        {"outcome", to_string(t.outcome)},
        {"residual", t.residual ? io::to_json(*t.residual) : nlohmann::json(nullptr)},
        {"residual_zero", t.residual_zero()}};
  return {{"pairs", pairs}, {"triples", triples}, {"verified", rep.verified()}};
}

}  // namespace detail

inline int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const auto in = detail::load_inputs(cfg);
  const FitMap fits = fit_all_cells(in.cover, in.features, cfg.max_overlap_degree);
  detail::emit(cfg,
               cfg.output_format == OutputFormat::json ? io::fits_to_json(fits).dump(2) + "\n"
                                                       : detail::fit_text(fits),
               out);
  return kOk;
}

inline int cmd_cocycle(const RunConfig& cfg, std::ostream& out) {
  const auto in = detail::load_inputs(cfg);
  const CocycleResult result = build_zero_cocycle(in.cover, in.features, cfg.max_overlap_degree);
  detail::emit(cfg,
               cfg.output_format == OutputFormat::json
                   ? io::report_to_json(result).dump(2) + "\n"
                   : detail::cocycle_text(result),
               out);
  if (result.report.any_obstructed()) return kObstructed;
  return result.report.verified() ? kOk : kVerifyFailed;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto in = detail::load_inputs(cfg);
  const FitMap fits = fit_all_cells(in.cover, in.features, cfg.max_overlap_degree);
  const TotalCochain cochain = io::cochain_from_json(
      io::parse_json(io::read_file(cfg.cochain_path), cfg.cochain_path), fits);
  ObstructionReport report;
  try {
    report = verify_cocycle(cochain, fits);
  } catch (const BaseMismatch& e) {
    detail::emit(cfg, std::string("verification failed: ") + e.what() + "\n", out);
    return kVerifyFailed;
  }
  detail::emit(cfg,
               cfg.output_format == OutputFormat::json ? detail::verify_json(report).dump(2) + "\n"
                                                       : detail::report_text(report),
               out);
  return report.verified() ? kOk : kVerifyFailed;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact local least-squares fits glued into a Čech–Koszul 0-cocycle"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string cover, model, output, format = "json";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dataset", cfg.dataset_path, "data set (.json or .csv)")->required();
    sub->add_option("--cover", cover, "cover JSON; default is a single chart D");
    sub->add_option("--model", model, "model JSON; default affine");
    sub->add_option("--max-degree", cfg.max_overlap_degree, "maximum Čech degree of overlaps")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
    sub->add_flag("--allow-negative-weights", cfg.allow_negative_weights);
    sub->add_option("--output", output, "write the report here instead of stdout");
  };
  auto* fit = app.add_subcommand("fit", "least-squares fit on every cell of the nerve");
  auto* cocycle = app.add_subcommand("cocycle", "build and verify the total-degree-0 cochain");
  auto* verify = app.add_subcommand("verify", "re-verify a cochain from a report file");
  add_common(fit);
  add_common(cocycle);
  add_common(verify);
  verify->add_option("--cochain", cfg.cochain_path, "report JSON produced by `cocycle`")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }
  if (!cover.empty()) cfg.cover_path = cover;
  if (!model.empty()) cfg.model_path = model;
  if (!output.empty()) cfg.output_path = output;
  cfg.output_format = format == "text" ? OutputFormat::text : OutputFormat::json;

  try {
    if (*fit) return cmd_fit(cfg, out);
    if (*cocycle) return cmd_cocycle(cfg, out);
    return cmd_verify(cfg, out);
  } catch (const Singular& e) {
    err << "error: " << e.what() << "\n";
    return kSingular;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"ckls"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ckls::cli
