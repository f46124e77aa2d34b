#pragma once

// Command line front end.  run_cli is the whole program; the binary's main
// just forwards to it so tests can drive the exact same code path in
// process and compare bytes.

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hornindex/hornindex.hpp"

namespace hornindex {
namespace cli {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty number list '" + s + "'");
  return out;
}

inline std::pair<double, double> parse_range(const std::string& s) {
  auto toks = split(s, ':');
  if (toks.size() != 2)
    throw std::invalid_argument("expected 'lo:hi', got '" + s + "'");
  return {std::stod(toks[0]), std::stod(toks[1])};
}

// "min" | "max" | "delta" | "W:s1,s2,..." (W: alone means the zero subspace).
inline ExtensionSpec parse_extension(const std::string& tag) {
  if (tag == "min") return {ExtensionVariant::Min, {}};
  if (tag == "max") return {ExtensionVariant::Max, {}};
  if (tag == "delta") return {ExtensionVariant::Delta, {}};
  if (tag.rfind("W:", 0) == 0) {
    ExtensionSpec e{ExtensionVariant::Subspace, {}};
    std::string rest = tag.substr(2);
    if (!rest.empty()) e.subspace = parse_list(rest);
    return e;
  }
  throw std::invalid_argument("unknown extension '" + tag +
                              "' (want min|max|delta|W:s1,s2,...)");
}

inline SpinStructure parse_spin(const std::string& s) {
  if (s == "trivial") return SpinStructure::Trivial;
  if (s == "nontrivial") return SpinStructure::NonTrivial;
  throw std::invalid_argument("unknown spin structure '" + s + "'");
}

inline GeometricOperatorModel make_model(const std::string& op,
                                         const std::string& section,
                                         const std::string& spin) {
  CrossSection cs = catalog_cross_section(section);
  if (op == "gb") return gb_normal_form(cs);
  if (op == "signature") return signature_normal_form(cs);
  if (op == "dirac") return dirac_normal_form(cs, parse_spin(spin));
  throw std::invalid_argument("unknown operator '" + op +
                              "' (want gb|signature|dirac)");
}

inline std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> out;
  if (n < 2) {
    out.push_back(lo);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(lo * std::pow(hi / lo, double(i) / double(n - 1)));
  return out;
}

// "pow:A" or "horn:A:eps0:eps"
inline WarpProfile parse_profile(const std::string& spec) {
  auto toks = split(spec, ':');
  if (toks[0] == "pow" && toks.size() == 2)
    return WarpProfile::pure_power(std::stod(toks[1]), /*cone=*/true);
  if (toks[0] == "horn" && toks.size() == 4)
    return WarpProfile::power_horn(std::stod(toks[1]), std::stod(toks[2]),
                                   std::stod(toks[3]));
  throw std::invalid_argument("unknown profile '" + spec +
                              "' (want pow:A or horn:A:eps0:eps)");
}

inline int emit(const ordered_json& j, const std::string& csv,
                const std::string& format, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  std::string payload;
  if (format == "csv") {
    if (csv.empty()) {
      err << "csv output is not available for this report; use --format json\n";
      return 2;
    }
    payload = csv;
  } else if (format == "json") {
    payload = j.dump(2) + "\n";
  } else {
    err << "unknown format '" << format << "' (want json|csv)\n";
    return 2;
  }
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      err << "cannot open output file '" << out_path << "'\n";
      return 2;
    }
    f << payload;
  } else {
    out << payload;
  }
  return 0;
}

}  // namespace detail

// Exit codes: 0 clean, 1 a numerical check failed, 2 bad usage or input.
inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Index computations for warped product metrics with a "
               "power-law end"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.set_version_flag("--version", "hornindex 0.1.0");

  std::string op = "gb", section = "torus2", spin = "trivial";
  std::string ext_tag = "delta", format = "json", out_path;
  std::string beta_spec = "1.5:2", profile_spec = "pow:2", mode = "scan";
  std::string lemma = "mls1";
  double alpha = 1.5, eps = 0.5, smax = 10.0, tol = 1e-8;
  double ahat = 0.0, geom_integral = 0.0, delta = 0.1, delta0 = 0.05;
  double wval = 0.5, bound_c = 1.0, eps0 = 0.25, eps_tilde = 0.1;
  double grading = 2.0, chi = 2.0;
  std::size_t mesh = 256, scount = 8, steps = 9;
  int kpoints = 1, pair_index = 0;
  bool with_oracle = false, with_parametrix = false, skip_table = false;

  auto* classify = app.add_subcommand(
      "classify", "Channel table and quotient dimension for a model operator");
  classify->add_option("--op", op, "Operator: gb|signature|dirac")->required();
  classify->add_option("--n", section,
                       "Cross section: circle|torus2|torus3|sphere2|sphere3")
      ->required();
  classify->add_option("--alpha", alpha, "Power of the warping end, > 1")
      ->required();
  classify->add_option("--spin", spin, "Spin structure: trivial|nontrivial");
  classify->add_option("--smax", smax, "Channel cutoff for listings");
  classify->add_option("--eps", eps, "End of the model collar");
  classify->add_option("--mesh", mesh, "Cells for the discretized cross check");
  classify->add_flag("--oracle", with_oracle,
                     "Cross check the quotient dimension against a discretized "
                     "solver");
  classify->add_flag("--parametrix", with_parametrix,
                     "Report the parametrix channel assignment instead");
  classify->add_option("--ext", ext_tag,
                       "Extension for --parametrix: min|max|delta|W:s1,...");
  classify->add_option("--format", format, "json|csv");
  classify->add_option("--out", out_path, "Write the report to a file");

  auto* index = app.add_subcommand("index", "Evaluate an index formula");
  index->add_option("--op", op, "Formula: chou|spindirac|gb|signature")
      ->required();
  index->add_option("--n", section, "Cross section name")->required();
  index->add_option("--alpha", alpha, "Power of the warping end");
  index->add_option("--ext", ext_tag, "Extension: min|max|delta|W:s1,...");
  index->add_option("--spin", spin, "Spin structure: trivial|nontrivial");
  index->add_option("--ahat", ahat, "Interior integral for the Dirac formulas");
  index->add_option("--integral,--euler", geom_integral,
                    "Interior geometric integral (curvature or L term)");
  index->add_option("--format", format, "json|csv");
  index->add_option("--out", out_path, "Write the report to a file");

  auto* bounds = app.add_subcommand(
      "bounds", "Sample a norm or decay estimate over a parameter grid");
  bounds->add_option("--lemma", lemma, "mls1|schur|normp|mls2")->required();
  bounds->add_option("--alpha", alpha, "Power of the warping factor");
  bounds->add_option("--eps", eps, "End of the model collar");
  bounds->add_option("--smax", smax, "Largest |s| in the grid");
  bounds->add_option("--samples", scount, "Grid points per parameter");
  bounds->add_option("--mesh", mesh, "Quadrature cells");
  bounds->add_option("--grading", grading, "Mesh grading exponent");
  bounds->add_option("--op", op, "Model operator for mls2");
  bounds->add_option("--n", section, "Cross section for mls2");
  bounds->add_option("--spin", spin, "Spin structure for mls2");
  bounds->add_option("--format", format, "json|csv");
  bounds->add_option("--out", out_path, "Write the report to a file");

  auto* homotopy = app.add_subcommand(
      "homotopy", "Deformation family checks between two end exponents");
  homotopy
      ->add_option("--mode", mode,
                   "scan|stability|graph|threshold|validate|remove")
      ->required();
  homotopy->add_option("--beta", beta_spec, "Exponent range lo:hi");
  homotopy->add_option("--eps", eps, "End of the model collar");
  homotopy->add_option("--eps0", eps0, "End of the pure power segment");
  homotopy->add_option("--epstilde", eps_tilde, "Interpolation cutoff");
  homotopy->add_option("--delta", delta0, "Volume budget for the scan");
  homotopy->add_option("--smax", smax, "Channel cutoff");
  homotopy->add_option("--mesh", mesh, "Quadrature cells");
  homotopy->add_option("--steps", steps, "Exponent sample count");
  homotopy->add_option("--w", wval, "Mass parameter for --mode threshold");
  homotopy->add_option("--bound", bound_c,
                       "Coefficient floor for --mode validate");
  homotopy->add_option("--op", op, "Model operator where one is needed");
  homotopy->add_option("--n", section, "Cross section where one is needed");
  homotopy->add_option("--spin", spin, "Spin structure");
  homotopy->add_option("--alpha", alpha, "Exponent for --mode remove");
  homotopy->add_option("--pair", pair_index, "Pair index for --mode remove");
  homotopy->add_option("--format", format, "json|csv");
  homotopy->add_option("--out", out_path, "Write the report to a file");

  auto* surface = app.add_subcommand(
      "surface", "Curvature integral bookkeeping for surfaces of revolution");
  surface->add_option("--profile", profile_spec,
                      "Profile: pow:A or horn:A:eps0:eps");
  surface->add_option("--delta", delta, "Inner cutoff of the collar");
  surface->add_option("--eps", eps, "Outer cutoff of the collar");
  surface->add_option("--tol", tol, "Quadrature agreement tolerance");
  surface->add_flag("--skip", skip_table,
                    "Tabulate the integer defect across exponents instead");
  surface->add_option("--chi", chi, "Euler characteristic of the smooth model");
  surface->add_option("--k", kpoints, "Number of singular points");
  surface->add_option("--beta", beta_spec, "Comma list of exponents for --skip");
  surface->add_option("--format", format, "json|csv");
  surface->add_option("--out", out_path, "Write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*classify) {
      auto model = detail::make_model(op, section, spin);
      if (with_parametrix) {
        ExtensionSpec ext = detail::parse_extension(ext_tag);
        auto rep = assemble_parametrix(model, alpha, ext, smax, eps);
        return detail::emit(json_of(rep), "", format, out_path, out, err);
      }
      auto rep = quotient_dimension(model, alpha, smax);
      ordered_json j = json_of(rep);
      bool ok = true;
      if (with_oracle) {
        auto orc = oracle_quotient_dim(model, alpha, mesh, eps);
        j["oracle"] = json_of(orc);
        ok = (orc.dim == rep.dim) && orc.borderline == 0;
        j["oracle_match"] = ok;
      }
      int rc = detail::emit(j, csv_of(rep), format, out_path, out, err);
      if (rc != 0) return rc;
      return ok ? 0 : 1;
    }

    if (*index) {
      ExtensionSpec ext = detail::parse_extension(ext_tag);
      CrossSection cs = catalog_cross_section(section);
      IndexReport rep;
      bool integrality_required = true;
      if (op == "chou") {
        rep = cone_dirac_index(cs, detail::parse_spin(spin), ext, ahat);
      } else if (op == "spindirac") {
        rep = horn_dirac_index(cs, detail::parse_spin(spin), alpha, ext, ahat);
      } else if (op == "gb") {
        rep = horn_gb_index(cs, alpha, geom_integral, ext);
      } else if (op == "signature") {
        rep = horn_signature_index(cs, alpha, geom_integral);
        integrality_required = false;  // defect is reported, not an error
      } else {
        throw std::invalid_argument("unknown index formula '" + op +
                                    "' (want chou|spindirac|gb|signature)");
      }
      int rc = detail::emit(json_of(rep), csv_of(rep), format, out_path, out,
                            err);
      if (rc != 0) return rc;
      return (!integrality_required || rep.integral_ok) ? 0 : 1;
    }

    if (*bounds) {
      if (lemma == "mls1") {
        WarpProfile p = WarpProfile::pure_power(alpha);
        auto svals = detail::log_spaced(0.25, smax, scount);
        auto rep = check_mls1_bounds(p, eps, svals, 12, mesh);
        std::vector<double> negs;
        for (double s : svals) negs.push_back(-s);
        auto decay = check_mls1_decay_fit(p, eps, negs, mesh);
        ordered_json j = json_of(rep);
        j["decay"] = json_of(decay);
        bool ok = rep.pass && decay.slope_pass;
        int rc = detail::emit(j, csv_of(rep), format, out_path, out, err);
        if (rc != 0) return rc;
        return ok ? 0 : 1;
      }
      if (lemma == "schur") {
        WarpProfile p = WarpProfile::pure_power(alpha);
        auto svals = detail::log_spaced(0.25, smax, scount);
        auto rep = check_schur_bounds(p, eps, svals);
        int rc = detail::emit(json_of(rep), csv_of(rep), format, out_path, out,
                              err);
        if (rc != 0) return rc;
        return rep.pass ? 0 : 1;
      }
      if (lemma == "normp") {
        WarpProfile p = WarpProfile::pure_power(alpha);
        auto pos = detail::log_spaced(0.25, smax, scount);
        std::vector<double> neg;
        for (double s : pos) neg.push_back(-s);
        ordered_json arr = ordered_json::array();
        bool ok = true;
        std::string csv = "lemma,s,x,gb,lhs,rhs,margin\n";
        const std::vector<std::pair<Branch, std::vector<double>>> combos = {
            {Branch::FromZero, pos}, {Branch::FromOne, neg}};
        for (auto kind : {CoeffKind::HornRatio, CoeffKind::Inverse}) {
          ChannelCoefficient c = coefficient(p, kind);
          for (const auto& [branch, svals] : combos) {
            auto rep = check_normp_bound(c, branch, eps, svals, grading);
            ordered_json e = json_of(rep);
            e["coefficient"] =
                (kind == CoeffKind::HornRatio ? "horn_ratio" : "inverse");
            e["branch"] = branch_tag(branch);
            arr.push_back(e);
            auto body = csv_of(rep);
            csv += body.substr(body.find('\n') + 1);
            ok = ok && rep.pass;
          }
        }
        ordered_json j;
        j["lemma"] = "normp";
        j["pass"] = ok;
        j["reports"] = arr;
        int rc = detail::emit(j, csv, format, out_path, out, err);
        if (rc != 0) return rc;
        return ok ? 0 : 1;
      }
      if (lemma == "mls2") {
        auto model = detail::make_model(op, section, spin);
        auto rep = perturbation_norm_bound(model, alpha, eps, smax, mesh);
        int rc = detail::emit(json_of(rep), "", format, out_path, out, err);
        if (rc != 0) return rc;
        return rep.ratio_pass ? 0 : 1;
      }
      throw std::invalid_argument("unknown lemma '" + lemma +
                                  "' (want mls1|schur|normp|mls2)");
    }

    if (*homotopy) {
      if (mode == "threshold") {
        ordered_json j;
        j["w"] = jnum(wval);
        j["threshold"] = contraction_threshold(wval);
        return detail::emit(j, "", format, out_path, out, err);
      }
      if (mode == "graph") {
        auto model = detail::make_model(op, section, spin);
        double sig = model_graph_sigma_min(model, smax);
        bool ok = sig >= 1.0 - 1e-8;
        ordered_json j;
        j["s_max"] = jnum(smax);
        j["sigma_min"] = jnum(sig);
        j["pass"] = ok;
        int rc = detail::emit(j, "", format, out_path, out, err);
        if (rc != 0) return rc;
        return ok ? 0 : 1;
      }
      if (mode == "stability") {
        auto model = detail::make_model(op, section, spin);
        auto [lo, hi] = detail::parse_range(beta_spec);
        auto betas = make_beta_samples(lo, hi, steps);
        auto rep = channel_index_stability(model, betas, smax, eps, mesh);
        int rc = detail::emit(json_of(rep), "", format, out_path, out, err);
        if (rc != 0) return rc;
        return rep.pass ? 0 : 1;
      }
      if (mode == "remove") {
        auto model = detail::make_model(op, section, spin);
        auto pairs = model.tilde_pairs(smax);
        if (pairs.empty())
          throw std::invalid_argument("model has no coupled channel pairs");
        if (pair_index < 0 || std::size_t(pair_index) >= pairs.size())
          throw std::invalid_argument("--pair out of range");
        auto rep = remove_perturbation_check(pairs[std::size_t(pair_index)],
                                             alpha, eps, {0.0, 0.5, 1.0}, mesh);
        int rc = detail::emit(json_of(rep), "", format, out_path, out, err);
        if (rc != 0) return rc;
        return rep.constant ? 0 : 1;
      }
      // scan and validate share the deformation family setup
      auto [lo, hi] = detail::parse_range(beta_spec);
      WarpProfile h1 = WarpProfile::power_horn(lo, eps0, 1.0, -1.0, lo <= 1.0);
      WarpProfile h2 = WarpProfile::power_horn(hi, eps0, 1.0, -1.0, hi <= 1.0);
      HomotopyFamily fam = make_homotopy(h1, h2, eps_tilde);
      if (mode == "scan") {
        auto rep = hs_continuity_scan(fam, eps, delta0, mesh);
        int rc = detail::emit(json_of(rep), csv_of(rep), format, out_path, out,
                              err);
        if (rc != 0) return rc;
        return rep.pass ? 0 : 1;
      }
      if (mode == "validate") {
        auto rep = validate_family(fam, bound_c, 2048, steps);
        bool ok = rep.bounds_pass && rep.sup_diffs_decreasing;
        int rc = detail::emit(json_of(rep), "", format, out_path, out, err);
        if (rc != 0) return rc;
        return ok ? 0 : 1;
      }
      throw std::invalid_argument(
          "unknown mode '" + mode +
          "' (want scan|stability|graph|threshold|validate|remove)");
    }

    if (*surface) {
      if (skip_table) {
        auto betas = detail::parse_list(
            beta_spec.find(':') == std::string::npos ? beta_spec : "1,1.5,2,3");
        auto rows = skip_phenomenon_scan(chi, kpoints, betas);
        return detail::emit(json_of(rows), csv_of(rows), format, out_path, out,
                            err);
      }
      WarpProfile p = detail::parse_profile(profile_spec);
      auto rep = warped_surface_euler_integral(p, delta, eps);
      bool ok = rep.abs_diff <= tol;
      ordered_json j = json_of(rep);
      j["tol"] = jnum(tol);
      j["pass"] = ok;
      int rc = detail::emit(j, "", format, out_path, out, err);
      if (rc != 0) return rc;
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace cli
}  // namespace hornindex
