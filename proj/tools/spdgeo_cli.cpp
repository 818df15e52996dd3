// Command-line front end: batch distances, geodesic endpoints, logarithms,
// parallel transports, sectional curvatures, metric validation, duality
// checks and an integrator benchmark over plain-text matrix files.
#include <chrono>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spdgeo/geodesics.hpp"
#include "spdgeo/io.hpp"

namespace {

using namespace spdgeo;

constexpr int kExitParse = 2;
constexpr int kExitDomain = 3;
constexpr int kExitUnsupported = 4;

struct Options {
  std::string metric = "ai:alpha=1,beta=0";
  int precision = 12;
  int steps = 100;
  double t = 1.0;
  std::string mode = "closed";
  std::string step_list = "25,50,100,200";
  Index validate_n = 3;
  bool trajectory = false;
  std::vector<std::string> files;
};

std::vector<SpdMatrix> load_spd(const std::string& path) {
  std::vector<SpdMatrix> out;
  for (const Matrix& m : read_matrix_file(path)) out.emplace_back(m);
  return out;
}

std::vector<SymMatrix> load_sym(const std::string& path) {
  std::vector<SymMatrix> out;
  for (const Matrix& m : read_matrix_file(path)) out.emplace_back(m);
  return out;
}

void require_count(size_t got, size_t want, const std::string& what) {
  if (got != want) {
    throw std::invalid_argument(what + ": expected " + std::to_string(want) + " blocks, got " +
                                std::to_string(got));
  }
}

MetricId require_id(const ParsedMetric& pm, const std::string& op) {
  if (!pm.id) {
    throw unsupported_operation(op + " requires a closed-form metric (" + pm.spec +
                                " is kernel-family only)");
  }
  return *pm.id;
}

int cmd_dist(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  const auto as = load_spd(o.files[0]);
  const auto bs = load_spd(o.files[1]);
  require_count(bs.size(), as.size(), "dist");
  for (size_t i = 0; i < as.size(); ++i) {
    std::cout << format_scalar(dist(require_id(pm, "dist"), as[i], bs[i]), o.precision) << "\n";
  }
  return 0;
}

int cmd_exp(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  const auto sigmas = load_spd(o.files[0]);
  const auto xs = load_sym(o.files[1]);
  require_count(xs.size(), sigmas.size(), "exp");
  for (size_t i = 0; i < sigmas.size(); ++i) {
    if (i) std::cout << "\n";
    if (o.mode == "hamiltonian") {
      IntegratorConfig cfg;
      cfg.steps = o.steps;
      const auto res = hamiltonian_geodesic(*pm.model(sigmas[i].dim()), sigmas[i], xs[i], o.t, cfg);
      if (o.trajectory) {
        for (const auto& [tk, mat] : res.trajectory) {
          std::cout << format_scalar(tk, o.precision);
          for (Index r = 0; r < mat.dim(); ++r)
            for (Index c = 0; c < mat.dim(); ++c)
              std::cout << " " << format_scalar(mat(r, c), o.precision);
          std::cout << "\n";
        }
      } else {
        std::cout << format_matrix(res.endpoint().m(), o.precision);
      }
    } else {
      std::cout << format_matrix(exp_map(require_id(pm, "exp"), sigmas[i], xs[i], o.t).m(),
                                 o.precision);
    }
  }
  return 0;
}

int cmd_log(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  const auto sigmas = load_spd(o.files[0]);
  const auto lambdas = load_spd(o.files[1]);
  require_count(lambdas.size(), sigmas.size(), "log");
  for (size_t i = 0; i < sigmas.size(); ++i) {
    if (i) std::cout << "\n";
    std::cout << format_matrix(log_map(require_id(pm, "log"), sigmas[i], lambdas[i]).m(),
                               o.precision);
  }
  return 0;
}

int cmd_transport(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  const MetricId id = require_id(pm, "transport");
  const auto sigmas = load_spd(o.files[0]);
  const auto lambdas = load_spd(o.files[1]);
  const auto xs = load_sym(o.files[2]);
  require_count(lambdas.size(), sigmas.size(), "transport");
  require_count(xs.size(), sigmas.size(), "transport");
  IntegratorConfig cfg;
  cfg.steps = o.steps;
  for (size_t i = 0; i < sigmas.size(); ++i) {
    if (i) std::cout << "\n";
    SymMatrix out = SymMatrix::Zero(sigmas[i].dim());
    if (o.mode == "ode") {
      out = id.kind == MetricKind::BuresWasserstein
                ? bw_transport_ode(sigmas[i], lambdas[i], xs[i], cfg)
                : connection_transport(id, sigmas[i], lambdas[i], xs[i], cfg);
    } else {
      out = parallel_transport(id, sigmas[i], lambdas[i], xs[i]);
    }
    std::cout << format_matrix(out.m(), o.precision);
  }
  return 0;
}

int cmd_curvature(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  const MetricId id = require_id(pm, "curvature");
  const auto sigmas = load_spd(o.files[0]);
  const auto xs = load_sym(o.files[1]);
  const auto ys = load_sym(o.files[2]);
  require_count(xs.size(), sigmas.size(), "curvature");
  require_count(ys.size(), sigmas.size(), "curvature");
  for (size_t i = 0; i < sigmas.size(); ++i) {
    std::cout << format_scalar(sectional_curvature(id, sigmas[i], xs[i], ys[i]), o.precision)
              << "\n";
  }
  return 0;
}

int cmd_validate(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  GridSpec grid;
  grid.n = o.validate_n;
  grid.seed = sampling_seed();
  const ValidationReport rep = validate_triple(pm.triple(o.validate_n), grid);
  std::cout << rep.to_text();
  return rep.all_pass() ? 0 : 1;
}

int cmd_cometric_check(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  const auto sigmas = load_spd(o.files[0]);
  for (const SpdMatrix& s : sigmas) {
    const MetricModelPtr model = pm.model(s.dim());
    const Matrix prod = model->metric_gram(s) * model->cometric_gram(s);
    const double dev = (prod - Matrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff();
    std::ostringstream os;
    os.precision(o.precision);
    os << std::scientific << dev;
    std::cout << os.str() << "\n";
  }
  return 0;
}

int cmd_bench(const Options& o) {
  const ParsedMetric pm = parse_metric(o.metric);
  const auto sigmas = load_spd(o.files[0]);
  const auto xs = load_sym(o.files[1]);
  require_count(xs.size(), sigmas.size(), "bench");
  std::vector<int> steps;
  std::istringstream ss(o.step_list);
  std::string tok;
  while (std::getline(ss, tok, ',')) steps.push_back(std::stoi(tok));

  std::cout << "steps\tendpoint_error\twall_ms\n";
  for (size_t i = 0; i < sigmas.size(); ++i) {
    const MetricModelPtr model = pm.model(sigmas[i].dim());
    for (int st : steps) {
      IntegratorConfig cfg;
      cfg.steps = st;
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = hamiltonian_geodesic(*model, sigmas[i], xs[i], o.t, cfg);
      const auto t1 = std::chrono::steady_clock::now();
      const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      std::string err = "n/a";
      if (model->has_closed_exp()) {
        const SpdMatrix exact = model->closed_exp(sigmas[i], xs[i], o.t);
        std::ostringstream os;
        os.precision(3);
        os << std::scientific << (res.endpoint().m() - exact.m()).norm();
        err = os.str();
      }
      std::ostringstream ms_os;
      ms_os.precision(3);
      ms_os << std::fixed << ms;
      std::cout << st << "\t" << err << "\t" << ms_os.str() << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian geometry of SPD matrices"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c, int nfiles) {
    c->add_option("--metric", o.metric, "metric spec, e.g. ai:alpha=1,beta=0 | bw | kernel:name=bkm");
    c->add_option("--precision", o.precision, "output decimal digits")->check(CLI::Range(1, 17));
    c->add_option("files", o.files, "matrix block files")->expected(nfiles);
  };

  auto* dist_cmd = app.add_subcommand("dist", "pairwise distances");
  add_common(dist_cmd, 2);
  auto* exp_cmd = app.add_subcommand("exp", "geodesic endpoints");
  add_common(exp_cmd, 2);
  exp_cmd->add_option("--t", o.t, "geodesic time");
  exp_cmd->add_option("--steps", o.steps, "integrator steps");
  exp_cmd->add_option("--mode", o.mode, "closed | hamiltonian")
      ->check(CLI::IsMember({"closed", "hamiltonian"}));
  exp_cmd->add_flag("--trajectory", o.trajectory, "print (t, row-major entries) rows");
  auto* log_cmd = app.add_subcommand("log", "Riemannian logarithms");
  add_common(log_cmd, 2);
  auto* tr_cmd = app.add_subcommand("transport", "parallel transport");
  add_common(tr_cmd, 3);
  tr_cmd->add_option("--mode", o.mode, "closed | ode")->check(CLI::IsMember({"closed", "ode"}));
  tr_cmd->add_option("--steps", o.steps, "integrator steps");
  auto* curv_cmd = app.add_subcommand("curvature", "sectional curvature per (sigma, x, y)");
  add_common(curv_cmd, 3);
  auto* val_cmd = app.add_subcommand("validate", "check the metric triple conditions");
  add_common(val_cmd, 0);
  val_cmd->add_option("--n", o.validate_n, "dimension for the validation grid");
  auto* com_cmd = app.add_subcommand("cometric-check", "max deviation of Gram(g) Gram(g*) from I");
  add_common(com_cmd, 1);
  auto* bench_cmd = app.add_subcommand("bench", "integrator error/time table");
  add_common(bench_cmd, 2);
  bench_cmd->add_option("--t", o.t, "geodesic time");
  bench_cmd->add_option("--step-list", o.step_list, "comma-separated step counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    if (app.got_subcommand("dist")) return cmd_dist(o);
    if (app.got_subcommand("exp")) return cmd_exp(o);
    if (app.got_subcommand("log")) return cmd_log(o);
    if (app.got_subcommand("transport")) return cmd_transport(o);
    if (app.got_subcommand("curvature")) return cmd_curvature(o);
    if (app.got_subcommand("validate")) return cmd_validate(o);
    if (app.got_subcommand("cometric-check")) return cmd_cometric_check(o);
    if (app.got_subcommand("bench")) return cmd_bench(o);
  } catch (const unsupported_operation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
