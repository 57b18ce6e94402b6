#include "g3/cli.hpp"

#include "g3/identities.hpp"
#include "g3/serialize.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

namespace g3
{
  namespace
  {

    constexpr const char * version = "1.0.0";

    struct Options
    {
      std::string command;
      std::string config_path;
      std::optional<std::uint64_t> seed;
      std::string json_path;
      std::string csv_path;
      bool verbose = false;
    };

    struct Check
    {
      std::string instance;
      std::string name;
      double residual = 0.0;
      double tolerance = 0.0;

      bool pass() const { return residual <= tolerance; }
    };

    struct CsvRow
    {
      double h = 0.0;
      int N = 0;
      int level = 0;
      double residual = 0.0;
    };

    Json load_config(const std::string & path)
    {
      if (path.empty()) return Json::object();
      std::ifstream in(path);
      if (!in) throw ConfigError("config file not readable: " + path);
      Json j;
      try {
        in >> j;
      } catch (const std::exception & e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      if (!j.is_object()) throw ConfigError("config must be a JSON object");
      return j;
    }

    template <typename T>
    T get_or(const Json & cfg, const std::string & key, T fallback)
    {
      if (!cfg.contains(key)) return fallback;
      try {
        return cfg.at(key).get<T>();
      } catch (const std::exception &) {
        throw ConfigError("config key has the wrong type: " + key);
      }
    }

    double positive(const Json & cfg, const std::string & key, double fallback)
    {
      double v = get_or<double>(cfg, key, fallback);
      if (!(v > 0.0)) throw ConfigError("config key must be positive: " + key);
      return v;
    }

    std::vector<std::string> instance_list(const Json & cfg)
    {
      auto names = get_or<std::vector<std::string>>(
        cfg, "instances", {"abelian", "conjugation", "commutator", "product"});
      if (names.empty()) throw ConfigError("config key 'instances' must be nonempty");
      for (const auto & n : names) make_instance(n); // validates the name
      return names;
    }

    std::vector<Vec> axis_directions(int n_vars, int d)
    {
      std::vector<Vec> dirs;
      for (int a = 0; a < d; ++a) {
        Vec v = Vec::Zero(n_vars);
        v[a] = 1.0;
        dirs.push_back(v);
      }
      return dirs;
    }

    void append_axiom_checks(std::vector<Check> & checks, const std::string & instance,
                             const std::string & suite, const AxiomReport & rep, double tol)
    {
      for (const auto & r : rep.results) {
        checks.push_back({instance, suite + "/" + r.name, r.max_residual, tol});
      }
    }

    //---------------------------------------------------------------- axioms

    void cmd_axioms(const Json & cfg, Rng & rng, std::vector<Check> & checks,
                    std::vector<CsvRow> &)
    {
      int samples = get_or<int>(cfg, "samples", 200);
      double scale = positive(cfg, "scale", 0.5);
      for (const auto & name : instance_list(cfg)) {
        auto mod = std::make_shared<TwoCrossedModule>(make_instance(name));
        double tol = positive(cfg, "tolerance", mod->nilpotent_exact ? 1e-12 : 1e-9);
        append_axiom_checks(checks, name, "group",
                            check_group_axioms(*mod, samples, rng, scale), tol);
        append_axiom_checks(checks, name, "differential",
                            check_differential_axioms(*mod, samples, rng, scale), tol);
        double gray_tol = positive(cfg, "tolerance", 1e-10);
        append_axiom_checks(checks, name, "groupoid",
                            check_gray_axioms(GrayGroupoid(mod), samples, rng, scale),
                            gray_tol);
      }
    }

    //------------------------------------------------------------ identities

    void cmd_identities(const Json & cfg, Rng & rng, std::vector<Check> & checks,
                        std::vector<CsvRow> &)
    {
      int samples = get_or<int>(cfg, "samples", 100);
      int n_vars = get_or<int>(cfg, "n_vars", 4);
      double tol = positive(cfg, "tolerance", 1e-10);
      auto catalog = form_identity_catalog();
      for (const auto & name : instance_list(cfg)) {
        FormContext ctx(std::make_shared<TwoCrossedModule>(make_instance(name)));
        for (const auto & ident : catalog) {
          double res = run_form_identity(ctx, ident, samples, rng, n_vars);
          checks.push_back({name, ident.name, res, tol});
        }
      }
    }

    //------------------------------------------------------------ covariance

    void cmd_covariance(const Json & cfg, Rng & rng, std::vector<Check> & checks,
                        std::vector<CsvRow> &)
    {
      int points = get_or<int>(cfg, "points", 50);
      int n_vars = get_or<int>(cfg, "n_vars", 4);
      double scale = positive(cfg, "scale", 0.5);
      double tol = positive(cfg, "tolerance", 1e-8);
      double coh_tol = positive(cfg, "coherence_tolerance", 1e-9);

      auto names = instance_list(cfg);
      if (cfg.contains("connection") && names.size() != 1) {
        throw ConfigError("a file-provided connection requires exactly one instance");
      }
      for (const auto & name : names) {
        FormContext ctx(std::make_shared<TwoCrossedModule>(make_instance(name)));
        ThreeConnection conn =
          cfg.contains("connection")
            ? connection_from_json(ctx, cfg.at("connection"))
            : ThreeConnection{Form::random(ctx.g_space(), n_vars, 1, rng, 2, scale),
                              Form::random(ctx.h_space(), n_vars, 2, rng, 2, scale),
                              Form::random(ctx.l_space(), n_vars, 3, rng, 2, scale)};
        GaugeData data = random_gauge(ctx, n_vars, rng, scale);
        CovarianceReport rep = verify_covariance(ctx, conn, data, points, rng);
        checks.push_back({name, "curvature-1", rep.res1, tol});
        checks.push_back({name, "curvature-2", rep.res2, tol});
        checks.push_back({name, "curvature-3", rep.res3, tol});
        checks.push_back({name, "closed-form-coherence", rep.coherence, coh_tol});
      }
    }

    //-------------------------------------------------------------- holonomy

    void cmd_holonomy(const Json & cfg, Rng & rng, std::vector<Check> & checks,
                      std::vector<CsvRow> & csv)
    {
      int n_vars = get_or<int>(cfg, "n_vars", 4);
      if (n_vars < 4) throw ConfigError("holonomy requires n_vars >= 4");
      auto h_values = get_or<std::vector<double>>(cfg, "h_values", {0.1, 0.05});
      auto n_values = get_or<std::vector<int>>(cfg, "n_values", {4, 8});
      if (h_values.size() != n_values.size() || h_values.empty()) {
        throw ConfigError("h_values and n_values must be nonempty and equal length");
      }
      double rel_tol = positive(cfg, "curvature_rel_tol", 0.05);
      double cov_tol = positive(cfg, "covariance_tolerance", 1e-9);
      int pairs = get_or<int>(cfg, "covariance_pairs", 3);
      auto curvature_names = get_or<std::vector<std::string>>(cfg, "curvature_instances",
                                                              {"abelian", "commutator"});

      // Convergence sweep of the curvature recovery, plus the compatibility
      // defects of the underlying colorings.
      std::vector<std::vector<double>> sweep(h_values.size(),
                                             std::vector<double>(3, 0.0));
      for (const auto & name : curvature_names) {
        FormContext ctx(std::make_shared<TwoCrossedModule>(make_instance(name)));
        ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
        Vec x = rng.coords(n_vars, 0.2);
        auto dirs = axis_directions(n_vars, 4);
        Mat vecs(n_vars, 4);
        for (int a = 0; a < 4; ++a) vecs.col(a) = dirs[static_cast<std::size_t>(a)];
        Vec oracle = curvatures(ctx, conn).omega3.evaluate(x, vecs);
        double oracle_scale = 1.0 + oracle.cwiseAbs().maxCoeff();

        for (std::size_t s = 0; s < h_values.size(); ++s) {
          double h = h_values[s];
          int N = n_values[s];
          std::vector<double> scales(4, h);
          CubeColoring probe = color_from_connection(ctx, conn, x, dirs, scales, N);
          AlgebraElement approx = finite_diff_omega3(ctx, conn, x, dirs, h, N);
          double rel = (approx.coords - oracle).cwiseAbs().maxCoeff() / oracle_scale;
          sweep[s][0] = std::max(sweep[s][0], probe.face_residual());
          sweep[s][1] = std::max(sweep[s][1], probe.cube_residual());
          sweep[s][2] = std::max(sweep[s][2], rel);
        }
      }
      for (std::size_t s = 0; s < h_values.size(); ++s) {
        for (int level = 1; level <= 3; ++level) {
          csv.push_back({h_values[s], n_values[s], level,
                         sweep[s][static_cast<std::size_t>(level - 1)]});
        }
      }
      checks.push_back({"(sweep)", "curvature-recovery", sweep.back()[2], rel_tol});

      // Exact holonomy covariance on random colorings and gauge data, or on
      // a coloring/gauge pair supplied in the config.
      auto names = instance_list(cfg);
      if (cfg.contains("coloring") != cfg.contains("gauge")) {
        throw ConfigError("coloring and gauge must be provided together");
      }
      if (cfg.contains("coloring")) {
        if (names.size() != 1) {
          throw ConfigError("a file-provided coloring requires exactly one instance");
        }
        auto mod = std::make_shared<TwoCrossedModule>(make_instance(names.front()));
        CubeColoring c = coloring_from_json(mod, cfg.at("coloring"));
        GaugeColoring gc = gauge_coloring_from_json(mod, cfg.at("gauge"));
        HolonomyCovarianceReport rep = verify_holonomy_covariance(c, gc);
        checks.push_back({names.front(), "holonomy-covariance", rep.residual, cov_tol});
        return;
      }
      for (const auto & name : names) {
        auto mod = std::make_shared<TwoCrossedModule>(make_instance(name));
        for (int p = 0; p < pairs; ++p) {
          CubeColoring c = random_coloring(mod, 4, rng);
          GaugeColoring gc = GaugeColoring::random(mod, 4, rng);
          HolonomyCovarianceReport rep = verify_holonomy_covariance(c, gc);
          checks.push_back({name, "holonomy-covariance/" + std::to_string(p),
                            rep.residual, cov_tol});
        }
      }
    }

    //------------------------------------------------------------- reporting

    Json report_json(const Options & opt, std::uint64_t seed,
                     const std::vector<Check> & checks, double wall_seconds)
    {
      Json j;
      j["command"] = opt.command;
      j["version"] = version;
      j["seed"] = seed;
      Json rows = Json::array();
      bool all = true;
      for (const auto & c : checks) {
        Json r;
        r["instance"] = c.instance;
        r["name"] = c.name;
        r["residual"] = c.residual;
        r["tolerance"] = c.tolerance;
        r["pass"] = c.pass();
        all = all && c.pass();
        rows.push_back(std::move(r));
      }
      j["checks"] = std::move(rows);
      j["pass"] = all;
      // Nondeterministic fields live in one isolated object so reports can be
      // compared byte-for-byte after removing it.
      j["timing"] = Json{{"wall_seconds", wall_seconds},
                         {"unix_time", static_cast<double>(std::time(nullptr))}};
      return j;
    }

    void write_csv(const std::string & path, const std::vector<CsvRow> & rows)
    {
      std::ofstream out(path);
      if (!out) throw ConfigError("csv output not writable: " + path);
      out << "h,N,level,residual\n";
      for (const auto & r : rows) {
        out << r.h << "," << r.N << "," << r.level << "," << r.residual << "\n";
      }
    }

    int run(const Options & opt)
    {
      Json cfg = load_config(opt.config_path);
      std::uint64_t seed = opt.seed ? *opt.seed : get_or<std::uint64_t>(cfg, "seed", 0);
      Rng rng(seed);

      std::vector<Check> checks;
      std::vector<CsvRow> csv;
      auto t0 = std::chrono::steady_clock::now();
      if (opt.command == "axioms") cmd_axioms(cfg, rng, checks, csv);
      else if (opt.command == "identities") cmd_identities(cfg, rng, checks, csv);
      else if (opt.command == "covariance") cmd_covariance(cfg, rng, checks, csv);
      else cmd_holonomy(cfg, rng, checks, csv);
      double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();

      bool all = true;
      double worst = 0.0;
      for (const auto & c : checks) {
        all = all && c.pass();
        worst = std::max(worst, c.residual);
        if (opt.verbose || !c.pass()) {
          std::cout << (c.pass() ? "pass" : "FAIL") << "  " << c.instance << "  "
                    << c.name << "  residual " << c.residual << "  tolerance "
                    << c.tolerance << "\n";
        }
      }
      std::cout << opt.command << ": " << (all ? "pass" : "FAIL") << " (" << checks.size()
                << " checks, worst residual " << worst << ")\n";

      if (!opt.json_path.empty()) {
        std::ofstream out(opt.json_path);
        if (!out) throw ConfigError("json output not writable: " + opt.json_path);
        out << report_json(opt, seed, checks, wall).dump(2) << "\n";
      }
      if (!opt.csv_path.empty()) write_csv(opt.csv_path, csv);
      return all ? 0 : 1;
    }

  } // namespace

  int run_cli(int argc, char ** argv)
  {
    CLI::App app{"3-gauge theory check suites: axioms, form identities, gauge "
                 "covariance and lattice holonomy"};
    app.require_subcommand(1);

    Options opt;
    for (const char * name : {"axioms", "identities", "covariance", "holonomy"}) {
      CLI::App * sub = app.add_subcommand(name);
      sub->add_option("--config", opt.config_path, "JSON config file");
      sub->add_option("--seed", opt.seed, "seed override");
      sub->add_option("--json", opt.json_path, "JSON report output path");
      sub->add_option("--csv", opt.csv_path, "CSV table output path");
      sub->add_flag("-v,--verbose", opt.verbose, "print every check");
      sub->callback([&opt, name]() { opt.command = name; });
    }

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError & e) {
      int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }

    try {
      return run(opt);
    } catch (const ConfigError & e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const SchemaError & e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const Error & e) {
      std::cerr << "check failed: " << e.what() << "\n";
      return 1;
    } catch (const std::exception & e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

} // namespace g3
