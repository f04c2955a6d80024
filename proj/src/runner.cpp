#include "wold/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <iomanip>
#include <sstream>

#include "wold/linalg.hpp"
#include "wold/oracle.hpp"

namespace wold {

const std::vector<std::pair<std::string, Real>>& task_catalog() {
  static const std::vector<std::pair<std::string, Real>> catalog{
      {"two_isometry_defect", 1e-9}, {"doubly_commuting", 1e-9},  {"wold_single", 1e-8},
      {"round_trip", 1e-6},          {"wold_pair", 1e-8},         {"slocinski", 1e-8},
      {"norm_identity", 1e-8},       {"two_variable_identity", 1e-8}, {"toeplitz_recovery", 1e-9},
      {"build_V", 1e-7},             {"extract_measure", 1e-6},   {"gram_oracle", 1e-6}};
  return catalog;
}

bool Report::pass() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const TaskResult& t) { return t.pass; });
}

Json Report::to_json() const {
  Json j;
  j["scenario"] = scenario;
  j["options"] = options;
  j["instances"] = instances;
  Json ts = Json::array();
  for (const auto& t : tasks) {
    Json r{{"index", t.index}, {"op", t.op}, {"instance", t.instance}, {"tol", t.tol}, {"pass", t.pass},
           {"residuals", residuals_to_json(t.residuals)}, {"details", t.details}};
    if (!t.error.empty()) r["error"] = t.error;
    r["wall_ms"] = t.wall_ms;
    ts.push_back(std::move(r));
  }
  j["tasks"] = std::move(ts);
  j["pass"] = pass();
  return j;
}

std::string Report::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "task,op,instance,residual,value,tol,pass\n";
  for (const auto& t : tasks) {
    if (t.residuals.entries().empty()) {
      os << t.index << ',' << t.op << ',' << t.instance << ",-,," << t.tol << ',' << (t.pass ? "true" : "false")
         << '\n';
      continue;
    }
    for (const auto& [name, value] : t.residuals.entries())
      os << t.index << ',' << t.op << ',' << t.instance << ',' << name << ',' << value << ',' << t.tol << ','
         << (t.pass ? "true" : "false") << '\n';
  }
  return os.str();
}

namespace {

struct Task {
  std::size_t index;
  std::string op;
  std::string instance;
  Json params;
  Real tol;
  bool expect_rejection;
};

struct Built {
  InstanceSpec spec;
  Instance instance;
};

std::string measure_names(std::size_t i, std::size_t count) {
  static const char* quad[] = {"nu1", "nu2", "eta1", "eta2"};
  return count == 1 ? "nu" : quad[i];
}

const Json& param_or_null(const Json& params, const char* key) {
  static const Json null;
  return params.contains(key) ? params[key] : null;
}

int int_param(const Json& params, const char* key, int fallback) {
  const Json& v = param_or_null(params, key);
  if (v.is_null()) return fallback;
  if (!v.is_number_integer()) throw ConfigError(std::string("params/") + key, "not an integer");
  return v.get<int>();
}

const OperatorModel& need_single(const Instance& inst, const std::string& op) {
  if (!inst.single) throw std::invalid_argument(op + ": instance has no single operator");
  return *inst.single;
}

const OperatorPair& need_pair(const Instance& inst, const std::string& op) {
  if (!inst.pair) throw std::invalid_argument(op + ": instance has no operator pair");
  return *inst.pair;
}

Vector random_unit(const Subspace& s, std::mt19937_64& rng) {
  std::normal_distribution<Real> normal;
  Vector c(s.dim());
  for (Index i = 0; i < c.size(); ++i) c(i) = Complex(normal(rng), normal(rng));
  Vector w = s.whitened() * c;
  w /= w.norm();
  return s.ambient()->unwhiten(w);
}

PolyVector random_poly(Caps caps, Index d, std::mt19937_64& rng) {
  std::normal_distribution<Real> normal;
  Vector c(basis_size(caps, d));
  for (Index i = 0; i < c.size(); ++i) c(i) = Complex(normal(rng), normal(rng));
  return PolyVector(caps, d, c);
}

Json fourier_table_json(const CircleMeasure& mu, int k) {
  Json t = Json::array();
  for (int n = -k; n <= k; ++n) {
    const Matrix c = fourier_coefficient(mu, n);
    t.push_back({{"n", n}, {"re", matrix_to_json(c, false)}, {"im", matrix_to_json(c, true)}});
  }
  return t;
}

// Compare recovered blocks and measures with the ones the instance was built from.
bool compare_truth(const Instance& inst, const std::vector<const Subspace*>& blocks,
                   const std::vector<const CircleMeasure*>& measures, const std::vector<std::string>& names,
                   int order, Real match_tol, TaskResult& r) {
  bool ok = true;
  if (inst.blocks.size() == blocks.size()) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      r.residuals.set("dim_error_" + names[i],
                      std::abs(static_cast<Real>(blocks[i]->dim() - inst.blocks[i].dim())));
      r.residuals.set("projector_error_" + names[i], subspace_distance(*blocks[i], inst.blocks[i]));
    }
  }
  if (inst.measures.size() == measures.size()) {
    Json matches = Json::object();
    for (std::size_t i = 0; i < measures.size(); ++i) {
      const CircleMeasure& truth = inst.measures[i];
      const CircleMeasure& got = *measures[i];
      if (truth.dim() == 0 && got.dim() == 0) continue;
      bool equal = false;
      if (truth.dim() == got.dim()) {
        const Equivalence e = measures_equal_up_to_unitary(got, truth, order, match_tol);
        equal = e.verdict == Verdict::equal;
        matches[measure_names(i, measures.size())] = equivalence_to_json(e);
      } else {
        matches[measure_names(i, measures.size())] = {{"verdict", "dimension_mismatch"}};
      }
      ok = ok && equal;
    }
    r.details["measure_match"] = ok;
    r.details["measure_comparisons"] = std::move(matches);
  }
  return ok;
}

}  // namespace

namespace {

using Handler = std::function<bool(const Task&, const Instance&, const RunOptions&, TaskResult&)>;

Tolerances task_tolerances(Real tol, const RunOptions& o) {
  Tolerances t;
  t.decomposition = tol;
  t.two_isometry *= o.tol_scale;
  t.doubly_commuting *= o.tol_scale;
  t.coefficient_map = tol;
  return t;
}

bool run_wold_single(const Task& task, const Instance& inst, const RunOptions& o, TaskResult& r, bool round_trip) {
  const SingleWold w = wold_single(need_single(inst, task.op), task_tolerances(std::min(task.tol, 1e-8 * o.tol_scale), o));
  r.details = decomposition_to_json(w);
  for (const auto& [k, v] : w.residuals.entries()) r.residuals.set(k, v);
  const int order = int_param(task.params, "K", 8);
  bool ok = true;
  if (round_trip) {
    ok = compare_truth(inst, {&w.h0, &w.h1}, {&w.extracted}, {"h0", "h1"}, order, task.tol, r);
    if (r.details.contains("measure_comparisons") && r.details["measure_comparisons"].contains("nu"))
      r.residuals.set("fourier_discrepancy", r.details["measure_comparisons"]["nu"]["discrepancy"].get<Real>());
  } else {
    compare_truth(inst, {&w.h0, &w.h1}, {}, {"h0", "h1"}, order, task.tol, r);
  }
  return ok;
}

bool run_pair(const Task& task, const Instance& inst, const RunOptions& o, TaskResult& r, bool isometric) {
  const OperatorPair& p = need_pair(inst, task.op);
  const Tolerances tol = task_tolerances(std::min(task.tol, 1e-8 * o.tol_scale), o);
  const QuadrupleDecomposition q = isometric ? slocinski(p.first, p.second, tol) : wold_pair(p.first, p.second, tol);
  r.details = decomposition_to_json(q);
  for (const auto& [k, v] : q.residuals.entries()) r.residuals.set(k, v);
  const Real match_tol = Tolerances{}.measure_match * o.tol_scale;
  return compare_truth(inst, {&q.h00, &q.h10, &q.h01, &q.h11}, {&q.nu1, &q.nu2, &q.eta1, &q.eta2},
                       {"h00", "h10", "h01", "h11"}, int_param(task.params, "K", 8), match_tol, r);
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"two_isometry_defect",
       [](const Task& task, const Instance& inst, const RunOptions&, TaskResult& r) {
         if (inst.single) {
           r.residuals.set("defect", two_isometry_defect(*inst.single));
         } else {
           const OperatorPair& p = need_pair(inst, task.op);
           r.residuals.set("defect_1", two_isometry_defect(p.first));
           r.residuals.set("defect_2", two_isometry_defect(p.second));
         }
         return true;
       }},
      {"doubly_commuting",
       [](const Task& task, const Instance& inst, const RunOptions&, TaskResult& r) {
         const OperatorPair& p = need_pair(inst, task.op);
         const CommutingResiduals c = doubly_commuting_residual(p.first, p.second);
         r.residuals.set("commutator", c.commutator);
         r.residuals.set("double_commutator", c.double_commutator);
         return true;
       }},
      {"wold_single",
       [](const Task& task, const Instance& inst, const RunOptions& o, TaskResult& r) {
         return run_wold_single(task, inst, o, r, false);
       }},
      {"round_trip",
       [](const Task& task, const Instance& inst, const RunOptions& o, TaskResult& r) {
         return run_wold_single(task, inst, o, r, true);
       }},
      {"wold_pair",
       [](const Task& task, const Instance& inst, const RunOptions& o, TaskResult& r) {
         return run_pair(task, inst, o, r, false);
       }},
      {"slocinski",
       [](const Task& task, const Instance& inst, const RunOptions& o, TaskResult& r) {
         return run_pair(task, inst, o, r, true);
       }},
      {"norm_identity",
       [](const Task& task, const Instance& inst, const RunOptions&, TaskResult& r) {
         const OperatorModel& t = need_single(inst, task.op);
         if (stable_range(t).dim() > 0) throw PreconditionError("norm_identity: operator is not analytic");
         const Calculus calc = make_calculus(t);
         std::mt19937_64 rng(static_cast<std::uint64_t>(int_param(task.params, "seed", 1)));
         const Subspace c = core(t.space(), t.axis(), int_param(task.params, "level", 2));
         Real worst = 0;
         const int samples = int_param(task.params, "samples", 50);
         for (int i = 0; i < samples; ++i) worst = std::max(worst, check_norm_identity(calc, random_unit(c, rng)));
         r.residuals.set("norm_identity", worst);
         return true;
       }},
      {"two_variable_identity",
       [](const Task& task, const Instance& inst, const RunOptions&, TaskResult& r) {
         const OperatorPair& p = need_pair(inst, task.op);
         for (const auto* t : {&p.first, &p.second})
           if (stable_range(*t).dim() > 0) throw PreconditionError("two_variable_identity: operator is not analytic");
         const PairCalculus calc = make_pair_calculus(p.first, p.second);
         std::mt19937_64 rng(static_cast<std::uint64_t>(int_param(task.params, "seed", 1)));
         const int level = int_param(task.params, "level", 2);
         const Subspace c = joint_core(p.first.space(), level, level);
         Real worst = 0;
         const int samples = int_param(task.params, "samples", 50);
         for (int i = 0; i < samples; ++i)
           worst = std::max(worst, check_two_variable_identity(calc, random_unit(c, rng)));
         r.residuals.set("two_variable_identity", worst);
         return true;
       }},
      {"toeplitz_recovery",
       [](const Task& task, const Instance& inst, const RunOptions&, TaskResult& r) {
         const OperatorModel& t = need_single(inst, task.op);
         const auto& src = t.space()->source();
         if (!src || src->caps().n2 != 0)
           throw std::invalid_argument("toeplitz_recovery: needs an unscrambled one-variable shift instance");
         const DefectOperator d = defect_operator(t);
         const Matrix& l = t.space()->cholesky_factor();
         const Matrix form = l * d.d.whitened() * d.d.whitened() * l.adjoint();  // G D^2
         const Index dim = src->dim();
         const int n = src->caps().n1;  // core(0, 1) holds degrees below the cap
         const FourierTable f(src->mu1(), n);
         Matrix diff(dim * n, dim * n);
         for (int p = 0; p < n; ++p)
           for (int m = 0; m < n; ++m)
             diff.block(p * dim, m * dim, dim, dim) =
                 form.block(p * dim, m * dim, dim, dim) - f(fourier_argument(m, p));
         r.residuals.set("toeplitz", linalg::norm2(diff));
         return true;
       }},
      {"build_V",
       [](const Task& task, const Instance& inst, const RunOptions& o, TaskResult& r) {
         const OperatorPair& p = need_pair(inst, task.op);
         Caps caps{int_param(task.params, "n1", -1), int_param(task.params, "n2", -1)};
         if (caps.n1 < 0 || caps.n2 < 0) {
           const auto& src = p.first.space()->source();
           if (!src) throw std::invalid_argument("build_V: params n1/n2 are required for this instance");
           caps = src->caps();
         }
         Tolerances tol = task_tolerances(task.tol, o);
         auto target = std::make_shared<const GradedPolySpace>(model_target(p.first, p.second, caps, tol));
         const CoefficientMap v = build_V(p.first, p.second, target, tol);
         for (const auto& [k, val] : v.residuals.entries()) r.residuals.set(k, val);
         r.details["target"] = space_metadata(*target);
         r.details["eta1"] = measure_to_json(target->mu1());
         r.details["eta2"] = measure_to_json(target->mu2());
         return true;
       }},
      {"extract_measure",
       [](const Task& task, const Instance& inst, const RunOptions&, TaskResult& r) {
         const OperatorModel& t = need_single(inst, task.op);
         const CircleMeasure mu = extract_measure(t);
         const int order = int_param(task.params, "K", 8);
         r.details["measure"] = measure_to_json(mu);
         r.details["fourier"] = fourier_table_json(mu, order);
         if (inst.kind == "shift1v" && inst.measures.size() == 1 && inst.measures[0].dim() == mu.dim()) {
           const Equivalence e = measures_equal_up_to_unitary(mu, inst.measures[0], order, task.tol);
           r.residuals.set("fourier_error", e.discrepancy);
           r.details["comparison"] = equivalence_to_json(e);
         }
         return true;
       }},
      {"gram_oracle",
       [](const Task& task, const Instance& inst, const RunOptions&, TaskResult& r) {
         const AmbientPtr amb = inst.ambient();
         const auto& src = amb->source();
         if (!src) throw std::invalid_argument("gram_oracle: needs an unscrambled shift1v or pair2v instance");
         std::mt19937_64 rng(static_cast<std::uint64_t>(int_param(task.params, "seed", 1)));
         QuadratureOptions q;
         q.grid = int_param(task.params, "grid", 512);
         Real worst = 0;
         const int samples = int_param(task.params, "samples", 3);
         for (int i = 0; i < samples; ++i) {
           const PolyVector f = random_poly(src->caps(), src->dim(), rng);
           const PolyVector g = random_poly(src->caps(), src->dim(), rng);
           const Complex closed = inner_product(*src, f, g);
           const Complex quad = quadrature_inner_product(f, g, src->mu1(), src->mu2(), q);
           worst = std::max(worst, std::abs(closed - quad) / (1 + std::abs(quad)));
         }
         r.residuals.set("relative_error", worst);
         return true;
       }},
  };
  return table;
}

InstanceSpec scaled(InstanceSpec s, const RunOptions& o) {
  for (int& c : s.caps) c = static_cast<int>(std::lround(c * o.caps_scale));
  s.seed += o.seed_offset;
  return s;
}

TaskResult execute(const Task& task, const Instance& inst, const RunOptions& o) {
  TaskResult r;
  r.index = task.index;
  r.op = task.op;
  r.instance = task.instance;
  r.tol = task.tol;
  const auto start = std::chrono::steady_clock::now();
  try {
    const bool extra = handlers().at(task.op)(task, inst, o, r);
    r.pass = extra && r.residuals.max() <= task.tol;
    for (const auto& e : r.residuals.entries())
      if (!std::isfinite(e.second)) r.pass = false;
    if (task.expect_rejection) {
      r.pass = false;
      r.error = "expected a precondition failure, none raised";
    }
  } catch (const PreconditionError& e) {
    r.error = e.what();
    r.pass = task.expect_rejection;
    r.details["rejected"] = true;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.pass = false;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

Report run_config(const Json& config, const RunOptions& options) {
  if (!config.is_object()) throw ConfigError("/", "config must be a JSON object");
  if (!(options.caps_scale > 0)) throw ConfigError("--caps-scale", "must be positive");
  if (!(options.tol_scale > 0)) throw ConfigError("--tol-scale", "must be positive");
  Report report;
  report.scenario = config.value("scenario", std::string("unnamed"));
  report.options = {{"caps_scale", options.caps_scale}, {"seed", options.seed_offset}, {"tol_scale", options.tol_scale}};

  if (!config.contains("instances") || !config["instances"].is_array())
    throw ConfigError("/instances", "missing or not an array");
  if (!config.contains("tasks") || !config["tasks"].is_array()) throw ConfigError("/tasks", "missing or not an array");

  std::map<std::string, std::shared_ptr<Built>> built;
  for (std::size_t i = 0; i < config["instances"].size(); ++i) {
    const std::string where = "/instances/" + std::to_string(i);
    InstanceSpec spec = scaled(instance_spec_from_json(config["instances"][i], where), options);
    if (built.count(spec.name)) throw ConfigError(where + "/name", "duplicate instance name '" + spec.name + "'");
    for (std::size_t k = 0; k < spec.measures.size(); ++k) {
      const PositivityReport pos = is_positive(spec.measures[k]);
      if (!pos.positive) {
        std::ostringstream os;
        os << "measure is not positive (worst eigenvalue " << pos.worst_eigenvalue << ")";
        throw ConfigError(where + "/measures/" + std::to_string(k), os.str());
      }
    }
    try {
      auto b = std::make_shared<Built>(Built{spec, build_instance(spec)});
      report.instances.push_back({{"name", spec.name},
                                  {"kind", spec.kind},
                                  {"digest", digest(instance_spec_to_json(spec))},
                                  {"dim", b->instance.ambient()->size()}});
      built[spec.name] = std::move(b);
    } catch (const std::exception& e) {
      throw ConfigError(where, e.what());
    }
  }

  std::vector<Task> tasks;
  for (std::size_t i = 0; i < config["tasks"].size(); ++i) {
    const Json& t = config["tasks"][i];
    const std::string where = "/tasks/" + std::to_string(i);
    if (!t.is_object()) throw ConfigError(where, "task must be an object");
    if (!t.contains("op") || !t["op"].is_string()) throw ConfigError(where + "/op", "missing or not a string");
    const std::string op = t["op"].get<std::string>();
    const auto& cat = task_catalog();
    auto it = std::find_if(cat.begin(), cat.end(), [&](const auto& c) { return c.first == op; });
    if (it == cat.end()) throw ConfigError(where + "/op", "unknown op '" + op + "'");
    if (!t.contains("instance") || !t["instance"].is_string())
      throw ConfigError(where + "/instance", "missing or not a string");
    const std::string name = t["instance"].get<std::string>();
    if (!built.count(name)) throw ConfigError(where + "/instance", "unknown instance '" + name + "'");
    Real tol = it->second;
    if (t.contains("tol")) {
      if (!t["tol"].is_number() || !(t["tol"].get<Real>() > 0)) throw ConfigError(where + "/tol", "must be a positive number");
      tol = t["tol"].get<Real>();
    }
    Json params = t.value("params", Json::object());
    if (!params.is_object()) throw ConfigError(where + "/params", "must be an object");
    const bool reject = t.value("expect_rejection", false);
    tasks.push_back(Task{i, op, name, std::move(params), tol * options.tol_scale, reject});
  }

  report.tasks.resize(tasks.size());
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, options.jobs));
  for (std::size_t begin = 0; begin < tasks.size(); begin += jobs) {
    const std::size_t end = std::min(tasks.size(), begin + jobs);
    std::vector<std::future<TaskResult>> running;
    for (std::size_t i = begin; i < end; ++i) {
      const Task* task = &tasks[i];
      const Instance* inst = &built.at(task->instance)->instance;
      running.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   [task, inst, &options] { return execute(*task, *inst, options); }));
    }
    for (std::size_t i = begin; i < end; ++i) report.tasks[i] = running[i - begin].get();
  }
  return report;
}

int run_files(const std::string& config_path, const std::string& out_path, const RunOptions& options,
              OutputFormat format) {
  Report report;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError(config_path, "cannot open config file");
    Json config;
    try {
      config = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(config_path, std::string("invalid JSON: ") + e.what());
    }
    report = run_config(config, options);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "io error: cannot write " << out_path << '\n';
    return 1;
  }
  if (format == OutputFormat::csv)
    out << report.to_csv();
  else
    out << report.to_json().dump(2) << '\n';
  if (!out) {
    std::cerr << "io error: failed writing " << out_path << '\n';
    return 1;
  }
  std::size_t passed = 0;
  for (const auto& t : report.tasks) {
    passed += t.pass ? 1 : 0;
    if (!t.pass)
      std::cerr << "task " << t.index << " (" << t.op << " on " << t.instance << ") failed"
                << (t.error.empty() ? "" : ": " + t.error) << '\n';
  }
  std::cout << passed << "/" << report.tasks.size() << " tasks passed\n";
  return report.pass() ? 0 : 2;
}

}  // namespace wold
