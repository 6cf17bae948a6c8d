#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rankcert/design.hpp"
#include "rankcert/errors.hpp"
#include "rankcert/generators.hpp"
#include "rankcert/geometry.hpp"
#include "rankcert/io.hpp"
#include "rankcert/matrix.hpp"
#include "rankcert/rank.hpp"
#include "rankcert/scaling.hpp"
#include "rankcert/selftest.hpp"
#include "rankcert/version.hpp"

namespace {

using rankcert::json;

struct Run {
  std::string command;
  json inputs = json::object();
  json result = json::object();
  bool json_out = false;
  int exit_code = 0;
};

rankcert::ComplexMatrix load_matrix(Run& run, const std::string& path) {
  std::string content = rankcert::read_file(path);
  run.inputs["input"] = {{"path", path}, {"digest", rankcert::fnv1a_hex(content)}};
  return rankcert::matrix_from_content(content);
}

rankcert::PointConfiguration load_points(Run& run, const std::string& path) {
  std::string content = rankcert::read_file(path);
  run.inputs["points"] = {{"path", path}, {"digest", rankcert::fnv1a_hex(content)}};
  return rankcert::points_from_text(content);
}

rankcert::Complex parse_complex_token(const std::string& tok) {
  auto e = rankcert::detail::split_entry(tok);
  return {rankcert::detail::parse_double_token(e.re),
          e.has_im ? rankcert::detail::parse_double_token(e.im) : 0.0};
}

rankcert::Rational parse_rational_token(const std::string& tok) {
  if (rankcert::looks_like_rational(tok)) return rankcert::parse_rational(tok);
  return rankcert::rational_from_double(rankcert::detail::parse_double_token(tok));
}

void print_human(const json& j, std::ostream& os, int indent = 0) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (j.is_object()) {
    for (const auto& [key, val] : j.items()) {
      if (val.is_object() || (val.is_array() && !val.empty() && val[0].is_structured())) {
        os << pad << key << ":\n";
        print_human(val, os, indent + 1);
      } else {
        os << pad << key << ": " << (val.is_string() ? val.get<std::string>() : val.dump())
           << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& el : j) {
      if (el.is_structured()) {
        os << pad << "-\n";
        print_human(el, os, indent + 1);
      } else {
        os << pad << "- " << (el.is_string() ? el.get<std::string>() : el.dump()) << "\n";
      }
    }
  } else {
    os << pad << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  Run run;

  CLI::App app{"certify rank lower bounds for sparse matrices and point configurations"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_flag("--json", run.json_out, "emit the full machine-readable report");

  // scale
  auto* scale = app.add_subcommand("scale", "Sinkhorn-scale a matrix to balanced norms");
  std::string scale_input, scale_out;
  double scale_eps = 1e-6;
  int scale_max_iter = 100000;
  scale->add_option("--input", scale_input, "matrix file")->required();
  scale->add_option("--eps", scale_eps, "convergence slack");
  scale->add_option("--max-iter", scale_max_iter, "iteration cap");
  scale->add_option("--out", scale_out, "write the scaled matrix here");
  scale->callback([&] {
    run.command = "scale";
    rankcert::ComplexMatrix M = load_matrix(run, scale_input);
    run.inputs["eps"] = scale_eps;
    run.inputs["max_iter"] = scale_max_iter;
    bool ps = rankcert::check_property_s_flow(rankcert::support_pattern(M));
    rankcert::ScalingResult res = rankcert::sinkhorn_scale(M, scale_eps, scale_max_iter);
    run.result = {{"scaling", rankcert::json_of(res)}, {"property_s", ps}};
    if (!scale_out.empty()) {
      rankcert::ComplexMatrix scaled = rankcert::apply_scaling(M, res.rho, res.gamma);
      rankcert::write_matrix_file(scaled, scale_out);
      run.result["out"] = scale_out;
    }
  });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "measure design parameters and certify a rank floor");
  std::string analyze_input;
  bool analyze_actual = false;
  long long analyze_rigidity = -1;
  analyze->add_option("--input", analyze_input, "matrix file")->required();
  analyze->add_flag("--actual", analyze_actual, "also compute the actual rank");
  analyze->add_option("--rigidity", analyze_rigidity,
                      "certify against up to this many changes per column instead");
  analyze->callback([&] {
    run.command = "analyze";
    rankcert::ComplexMatrix M = load_matrix(run, analyze_input);
    if (analyze_rigidity >= 0) {
      run.inputs["s"] = analyze_rigidity;
      run.result = {{"report",
                     rankcert::json_of(rankcert::monotone_rigidity_certificate(M, analyze_rigidity))}};
    } else {
      run.inputs["actual"] = analyze_actual;
      run.result = {{"report", rankcert::json_of(rankcert::analyze(M, analyze_actual))}};
    }
  });

  // cover
  auto* cover = app.add_subcommand("cover", "build a row cover with per-column guarantees");
  std::string cover_input, cover_type = "q", cover_out;
  cover->add_option("--input", cover_input, "matrix file")->required();
  cover->add_option("--type", cover_type, "cover flavor: q or group")
      ->check(CLI::IsMember({"q", "group"}));
  cover->add_option("--out", cover_out, "write the cover matrix here")->required();
  cover->callback([&] {
    run.command = "cover";
    rankcert::ComplexMatrix M = load_matrix(run, cover_input);
    run.inputs["type"] = cover_type;
    rankcert::CoverMatrix cov =
        cover_type == "group" ? rankcert::build_group_cover(M) : rankcert::build_q_cover(M);
    rankcert::write_matrix_file(cov.B, cover_out);
    rankcert::write_file(cover_out + ".json", rankcert::json_of(cov).dump(2) + "\n");
    rankcert::ScalingResult sc = rankcert::cover_to_scaling(M, cov);
    run.result = {{"cover", rankcert::json_of(cov)},
                  {"scaling", rankcert::json_of(sc)},
                  {"out", cover_out},
                  {"sidecar", cover_out + ".json"}};
  });

  // rigidity
  auto* rigidity = app.add_subcommand("rigidity", "rank floor robust to in-support perturbations");
  std::string rig_input;
  long long rig_s = 0;
  rigidity->add_option("--input", rig_input, "matrix file")->required();
  rigidity->add_option("--s", rig_s, "changes allowed per column")->required();
  rigidity->callback([&] {
    run.command = "rigidity";
    rankcert::ComplexMatrix M = load_matrix(run, rig_input);
    run.inputs["s"] = rig_s;
    run.result = {{"report", rankcert::json_of(rankcert::monotone_rigidity_certificate(M, rig_s))}};
  });

  // sg
  auto* sg = app.add_subcommand("sg", "line-incidence analysis of a point configuration");
  std::string sg_points, sg_extract, sg_variant = "plain";
  double sg_tol = 1e-9;
  int sg_k = 0;
  sg->add_option("--points", sg_points, "points file")->required();
  sg->add_option("--tol", sg_tol, "collinearity tolerance for floating inputs");
  sg->add_option("--extract", sg_extract, "peel to a subset with this minimum delta");
  sg->add_option("--k", sg_k, "work with k-flats instead of lines");
  sg->add_option("--variant", sg_variant, "flat variant: plain or star")
      ->check(CLI::IsMember({"plain", "star"}));
  sg->callback([&] {
    run.command = "sg";
    rankcert::PointConfiguration C = load_points(run, sg_points);
    run.inputs["tol"] = sg_tol;
    if (!sg_extract.empty()) {
      rankcert::Rational target = parse_rational_token(sg_extract);
      run.inputs["extract"] = rankcert::rat_str(target);
      run.result = {{"report", rankcert::json_of(rankcert::avg_case_extract(C, target, sg_tol))}};
    } else if (sg_k >= 1) {
      run.inputs["k"] = sg_k;
      run.inputs["variant"] = sg_variant;
      auto variant =
          sg_variant == "star" ? rankcert::FlatVariant::star : rankcert::FlatVariant::plain;
      run.result = {{"report", rankcert::json_of(rankcert::flat_bound_check(C, sg_k, variant, sg_tol))}};
    } else {
      run.result = {{"report", rankcert::json_of(rankcert::sg_bound_check(C, sg_tol))}};
    }
  });

  // flats
  auto* flats = app.add_subcommand("flats", "flat-incidence analysis of a point configuration");
  std::string flats_points, flats_variant = "plain";
  int flats_k = 1;
  double flats_tol = 1e-9;
  flats->add_option("--points", flats_points, "points file")->required();
  flats->add_option("--k", flats_k, "flat dimension parameter");
  flats->add_option("--variant", flats_variant, "plain or star")
      ->check(CLI::IsMember({"plain", "star"}));
  flats->add_option("--tol", flats_tol, "membership tolerance for floating inputs");
  flats->callback([&] {
    run.command = "flats";
    rankcert::PointConfiguration C = load_points(run, flats_points);
    run.inputs["k"] = flats_k;
    run.inputs["variant"] = flats_variant;
    run.inputs["tol"] = flats_tol;
    auto variant =
        flats_variant == "star" ? rankcert::FlatVariant::star : rankcert::FlatVariant::plain;
    run.result = {{"report", rankcert::json_of(rankcert::flat_bound_check(C, flats_k, variant, flats_tol))}};
  });

  // freiman
  auto* freiman = app.add_subcommand("freiman", "doubling constant of a point set");
  std::string fr_points, fr_alpha = "1/2";
  double fr_tol = 1e-9;
  freiman->add_option("--points", fr_points, "points file")->required();
  freiman->add_option("--alpha", fr_alpha, "combination coefficient, real or re,im");
  freiman->add_option("--tol", fr_tol, "image deduplication tolerance");
  freiman->callback([&] {
    run.command = "freiman";
    rankcert::PointConfiguration C = load_points(run, fr_points);
    rankcert::Complex alpha = parse_complex_token(fr_alpha);
    run.inputs["alpha"] = {alpha.real(), alpha.imag()};
    run.inputs["tol"] = fr_tol;
    run.result = {{"report",
                   rankcert::json_of(rankcert::freiman_report(C, alpha, nullptr, fr_tol))}};
  });

  // gen
  auto* gen = app.add_subcommand("gen", "generate example matrices and configurations");
  gen->require_subcommand(1);

  auto* gp = gen->add_subcommand("plane", "projective plane incidence matrix");
  int gp_p = 3;
  std::string gp_out;
  gp->add_option("--p", gp_p, "prime order")->required();
  gp->add_option("--out", gp_out, "output matrix file")->required();
  gp->callback([&] {
    run.command = "gen";
    run.inputs = {{"kind", "plane"}, {"p", gp_p}, {"out", gp_out}};
    rankcert::ComplexMatrix M = rankcert::gen_projective_plane(gp_p);
    rankcert::write_matrix_file(M, gp_out);
    run.result = {{"written", gp_out}, {"m", M.m}, {"n", M.n},
                  {"params", rankcert::json_of(rankcert::design_params(rankcert::support_pattern(M)))}};
  });

  auto* gb = gen->add_subcommand("block", "block-diagonal all-ones matrix");
  int gb_n = 6, gb_s = 2;
  std::string gb_out;
  gb->add_option("--n", gb_n, "matrix size")->required();
  gb->add_option("--s", gb_s, "block size")->required();
  gb->add_option("--out", gb_out, "output matrix file")->required();
  gb->callback([&] {
    run.command = "gen";
    run.inputs = {{"kind", "block"}, {"n", gb_n}, {"s", gb_s}, {"out", gb_out}};
    rankcert::ComplexMatrix M = rankcert::gen_block_diagonal(gb_n, gb_s);
    rankcert::write_matrix_file(M, gb_out);
    run.result = {{"written", gb_out}, {"m", M.m}, {"n", M.n}};
  });

  auto* gl = gen->add_subcommand("lines", "disjoint lines in general position");
  int gl_lines = 3, gl_ppl = 4, gl_dim = 3;
  std::uint64_t gl_seed = 0;
  std::string gl_out;
  gl->add_option("--lines", gl_lines, "number of lines")->required();
  gl->add_option("--points-per-line", gl_ppl, "points on each line")->required();
  gl->add_option("--dim", gl_dim, "ambient dimension");
  gl->add_option("--seed", gl_seed, "random seed");
  gl->add_option("--out", gl_out, "output points file")->required();
  gl->callback([&] {
    run.command = "gen";
    run.inputs = {{"kind", "lines"}, {"lines", gl_lines}, {"points_per_line", gl_ppl},
                  {"dim", gl_dim}, {"seed", gl_seed}, {"out", gl_out}};
    rankcert::PointConfiguration C =
        rankcert::gen_lines_general_position(gl_lines, gl_ppl, gl_dim, gl_seed);
    rankcert::write_points_file(C, gl_out);
    run.result = {{"written", gl_out}, {"n", C.n}, {"d", C.d},
                  {"delta", rankcert::rat_str(rankcert::sg_delta(C))}};
  });

  auto* gh = gen->add_subcommand("hesse", "the nine-point Hesse configuration");
  std::string gh_out;
  gh->add_option("--out", gh_out, "output points file")->required();
  gh->callback([&] {
    run.command = "gen";
    run.inputs = {{"kind", "hesse"}, {"out", gh_out}};
    rankcert::PointConfiguration C = rankcert::gen_hesse();
    rankcert::write_points_file(C, gh_out);
    run.result = {{"written", gh_out}, {"n", C.n}, {"d", C.d}};
  });

  auto* gr = gen->add_subcommand("random", "random matrix with prescribed design parameters");
  int gr_m = 8, gr_n = 6, gr_q = 3, gr_k = 3, gr_t = 1;
  std::uint64_t gr_seed = 0;
  std::string gr_out;
  gr->add_option("--m", gr_m, "rows")->required();
  gr->add_option("--n", gr_n, "columns")->required();
  gr->add_option("--q", gr_q, "max row support")->required();
  gr->add_option("--k", gr_k, "min column support")->required();
  gr->add_option("--t", gr_t, "max pairwise column intersection")->required();
  gr->add_option("--seed", gr_seed, "random seed");
  gr->add_option("--out", gr_out, "output matrix file")->required();
  gr->callback([&] {
    run.command = "gen";
    run.inputs = {{"kind", "random"}, {"m", gr_m}, {"n", gr_n}, {"q", gr_q},
                  {"k", gr_k}, {"t", gr_t}, {"seed", gr_seed}, {"out", gr_out}};
    rankcert::RandomDesignResult res =
        rankcert::gen_random_design(gr_m, gr_n, gr_q, gr_k, gr_t, gr_seed);
    run.result = rankcert::json_of(res);
    if (res.feasible) {
      rankcert::write_matrix_file(*res.matrix, gr_out);
      run.result["written"] = gr_out;
    }
  });

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
  int st_only = 0;
  selftest->add_option("--only", st_only, "run a single criterion by number");
  selftest->callback([&] {
    run.command = "selftest";
    run.inputs = st_only > 0 ? json{{"only", st_only}} : json::object();
    std::vector<rankcert::CriterionResult> results;
    if (st_only > 0)
      results.push_back(rankcert::run_criterion(st_only));
    else
      results = rankcert::run_all_criteria();
    json arr = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
      arr.push_back(rankcert::json_of(r));
      all_pass = all_pass && r.pass;
      if (!run.json_out)
        std::cout << "criterion " << r.id << " (" << r.name
                  << "): " << (r.pass ? "PASS" : "FAIL") << " [" << r.ms << " ms] "
                  << r.detail << "\n";
    }
    run.result = {{"criteria", arr}, {"all_pass", all_pass}};
    if (!all_pass) run.exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const rankcert::Error& e) {
    run.result = {{"error", {{"code", e.code()}, {"message", e.what()}}}};
    run.exit_code = 1;
  } catch (const std::exception& e) {
    run.result = {{"error", {{"code", "Internal"}, {"message", e.what()}}}};
    run.exit_code = 1;
  }

  const long long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  json envelope = {{"command", run.command},
                   {"inputs", run.inputs},
                   {"result", run.result},
                   {"versions", rankcert::kVersion},
                   {"elapsed_ms", ms}};
  if (run.json_out) {
    std::cout << envelope.dump(2) << "\n";
  } else if (run.result.contains("error")) {
    std::cerr << "error " << run.result["error"]["code"].get<std::string>() << ": "
              << run.result["error"]["message"].get<std::string>() << "\n";
  } else if (run.command != "selftest") {
    print_human(run.result, std::cout);
  }
  return run.exit_code;
}
