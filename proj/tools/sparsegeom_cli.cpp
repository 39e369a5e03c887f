// Command-line front end: point-set ingestion, nearest-structure queries,
// oracle checking against exhaustive enumeration, coarse benchmarking, and
// the executable reductions (k-sum, Hopcroft lift, affine degeneracy).
// Output is JSON Lines with a stable field order; all randomness flows from
// --seed, so identical configurations reproduce identical result fields.

#include "CLI11.hpp"
#include "json.hpp"

#include "sparsegeom/book.hpp"
#include "sparsegeom/bouquet.hpp"
#include "sparsegeom/geometry.hpp"
#include "sparsegeom/io.hpp"
#include "sparsegeom/offline_segment.hpp"
#include "sparsegeom/reductions.hpp"
#include "sparsegeom/star.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

using namespace sparsegeom;

namespace {

using ojson = nlohmann::ordered_json;

// --------------------------------------------------------------- logging --

int log_level() {
  static const int lvl = [] {
    const char* env = std::getenv("SPARSEGEOM_LOG");
    if (env == nullptr) return 0;
    const std::string v(env);
    if (v == "debug" || v == "2") return 2;
    if (v.empty() || v == "0" || v == "off") return 0;
    return 1;
  }();
  return lvl;
}

void logmsg(int lvl, const std::string& msg) {
  if (log_level() >= lvl) std::cerr << "[sparsegeom] " << msg << "\n";
}

// ---------------------------------------------------------------- timing --

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------- output --

struct Emitter {
  std::ofstream file;
  std::ostream* out = &std::cout;

  explicit Emitter(const std::string& path) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) fail(ErrorCode::ParseError, "cannot write '" + path + "'");
      out = &file;
    }
  }
  void raw(const std::string& line) { (*out) << line << '\n'; }
  void obj(const ojson& j) { raw(j.dump()); }
};

// ------------------------------------------------------------- iteration --

// Lexicographic k-subsets of {0..n-1}, visited sequentially.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

void check_subset_budget(std::size_t n, std::size_t k, std::size_t budget) {
  double count = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    count *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (count > static_cast<double>(budget))
      fail(ErrorCode::InstanceTooLarge,
           "budget exceeded: C(" + std::to_string(n) + ", " +
               std::to_string(k) + ") subsets > " + std::to_string(budget));
  }
}

// Order-stable parallel map: fn(i) runs once per index, results land by
// index, the first exception (if any) is rethrown after the join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::once_flag error_once;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::call_once(error_once,
                       [&] { first_error = std::current_exception(); });
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min(threads, count);
  pool.reserve(spawn);
  for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ------------------------------------------------- exact oracle distances --

// Distance to the affine hull of the columns of S, valid for affinely
// dependent subsets (least squares over the difference matrix).
double affine_span_distance(MatrixRef S, VectorRef q) {
  if (S.cols() == 1) return (q - S.col(0)).norm();
  const Matrix D = affine_diffs(S);
  const Vector x = D.completeOrthogonalDecomposition().solve(q - S.col(0));
  return (q - S.col(0) - D * x).norm();
}

double linear_span_distance(MatrixRef S, VectorRef q) {
  const Vector x = S.completeOrthogonalDecomposition().solve(q);
  return (q - S * x).norm();
}

Matrix gather(const PointSet& P, const std::vector<std::size_t>& ids) {
  Matrix S(P.dim(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i)
    S.col(static_cast<Eigen::Index>(i)) =
        P.col(static_cast<Eigen::Index>(ids[i]));
  return S;
}

// Exact sparse linear regression: enumerate every k-subset and keep the
// best span distance; ties break to the lexicographically smallest witness.
QueryResult slr_exact_query(const PointSet& P, std::size_t k, VectorRef q) {
  if (static_cast<std::size_t>(P.size()) < k)
    fail(ErrorCode::TooFewPoints, "slr needs at least k points");
  QueryResult best;
  bool have = false;
  for_each_subset(
      static_cast<std::size_t>(P.size()), k,
      [&](const std::vector<std::size_t>& ids) {
        const Matrix S = gather(P, ids);
        const FlatProjection proj = linear_flat_distance(S, q);
        QueryResult r;
        r.variant = Variant::SLR;
        r.distance = proj.distance;
        r.witness_ids = ids;
        for (std::size_t i = 0; i < ids.size(); ++i)
          r.tau.emplace_back(ids[i], proj.coeffs(static_cast<Eigen::Index>(i)));
        if (!have || better_result(r, best)) {
          best = std::move(r);
          have = true;
        }
      });
  return best;
}

// ---------------------------------------------------------------- engine --

// A built structure behind a uniform query signature.  build_ms is zero for
// the per-query offline variant, which has no reusable structure.
struct Engine {
  double build_ms = 0.0;
  std::function<QueryResult(VectorRef, std::uint64_t)> run;
};

Engine make_engine(const RunConfig& cfg, const PointSet& P) {
  const AnnBackend be = backend_from_name(cfg.backend);
  Engine eng;
  const auto t0 = Clock::now();
  if (cfg.variant == "slr") {
    check_subset_budget(static_cast<std::size_t>(P.size()), cfg.k,
                        cfg.budget_structures);
    eng.run = [&P, k = cfg.k](VectorRef q, std::uint64_t) {
      return slr_exact_query(P, k, q);
    };
  } else if (cfg.variant == "anlf") {
    auto idx = std::make_shared<InducedFlatIndex>(anlf_build(
        P, cfg.k, cfg.epsilon, be, cfg.budget_structures));
    eng.run = [idx](VectorRef q, std::uint64_t) { return anlf_query(*idx, q); };
  } else if (cfg.variant == "anif") {
    auto idx = std::make_shared<InducedFlatIndex>(anif_build(
        P, cfg.k, cfg.epsilon, be, cfg.budget_structures));
    eng.run = [idx](VectorRef q, std::uint64_t) { return anif_query(*idx, q); };
  } else if (cfg.variant == "anis") {
    auto idx = std::make_shared<InducedSimplexIndex>(anis_build(
        P, cfg.k, cfg.epsilon, be, cfg.budget_structures));
    eng.run = [idx](VectorRef q, std::uint64_t seed) {
      return anis_query(*idx, q, seed);
    };
  } else if (cfg.variant == "segment") {
    auto idx = std::make_shared<OnlineSegmentIndex>(
        online_segment_build(P, cfg.epsilon, be));
    eng.run = [idx](VectorRef q, std::uint64_t) {
      return online_segment_query(*idx, q);
    };
  } else if (cfg.variant == "segment-offline") {
    eng.run = [&P, eps = cfg.epsilon, be](VectorRef q, std::uint64_t) {
      return offline_nearest_segment(P, q, eps, be);
    };
  } else {
    fail(ErrorCode::InvalidArgument, "unknown variant '" + cfg.variant + "'");
  }
  eng.build_ms = cfg.variant == "segment-offline" ? 0.0 : ms_since(t0);
  logmsg(1, "built " + cfg.variant + " structure in " +
                std::to_string(eng.build_ms) + " ms");
  return eng;
}

// Exhaustive reference distance for oracle-check, per variant.
double oracle_distance(const std::string& variant, const PointSet& P,
                       std::size_t k, VectorRef q) {
  double best = std::numeric_limits<double>::infinity();
  if (variant == "segment" || variant == "segment-offline") {
    for (Eigen::Index i = 0; i < P.size(); ++i)
      for (Eigen::Index j = i + 1; j < P.size(); ++j)
        best = std::min(best, point_segment_distance(q, P.col(i), P.col(j)));
    return best;
  }
  for_each_subset(static_cast<std::size_t>(P.size()), k,
                  [&](const std::vector<std::size_t>& ids) {
                    const Matrix S = gather(P, ids);
                    double d;
                    if (variant == "slr" || variant == "anlf")
                      d = linear_span_distance(S, q);
                    else if (variant == "anif")
                      d = affine_span_distance(S, q);
                    else
                      d = simplex_distance(S, ids, q).distance;
                    best = std::min(best, d);
                  });
  return best;
}

double approximation_bound(const std::string& variant, double epsilon) {
  if (variant == "slr") return 1.0;
  if (variant == "anis") return 1.0 + 2.0 * epsilon;
  if (variant == "segment-offline") return 2.0 * (1.0 + epsilon);
  return 1.0 + epsilon;  // slr-family flats and online segments
}

std::uint64_t query_seed(std::uint64_t base, std::size_t i) {
  return base + kDefaultQuerySeed * (i + 1);
}

Matrix random_points(std::mt19937_64& rng, Eigen::Index d, Eigen::Index n,
                     double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Matrix pts(d, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index r = 0; r < d; ++r) pts(r, i) = U(rng);
  return pts;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::int64_t value = 0;
    const char* first = text.data() + start;
    const char* last = text.data() + comma;
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || first == last)
      fail(ErrorCode::ParseError,
           "bad integer '" + text.substr(start, comma - start) + "'");
    out.push_back(value);
    start = comma + 1;
  }
  return out;
}

// ------------------------------------------------------------- commands --

int run_query(const RunConfig& cfg) {
  validate_config(cfg);
  const PointSet P = load_pointset(cfg.input_path);
  const PointSet Q = load_pointset(cfg.queries_path);
  if (Q.dim() != P.dim())
    fail(ErrorCode::DimensionMismatch,
         "queries have dim " + std::to_string(Q.dim()) + ", points have dim " +
             std::to_string(P.dim()));
  logmsg(1, "loaded " + std::to_string(P.size()) + " points, " +
                std::to_string(Q.size()) + " queries (dim " +
                std::to_string(P.dim()) + ")");
  const Engine eng = make_engine(cfg, P);
  std::vector<std::string> lines(static_cast<std::size_t>(Q.size()));
  parallel_for(lines.size(), cfg.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    ResultRecord rec;
    rec.result = eng.run(Q.col(static_cast<Eigen::Index>(i)),
                         query_seed(cfg.seed, i));
    rec.query_ms = ms_since(t0);
    rec.build_ms = eng.build_ms;
    rec.backend = cfg.backend;
    rec.k = cfg.k;
    rec.epsilon = cfg.epsilon;
    rec.seed = cfg.seed;
    lines[i] = record_to_json(rec);
    logmsg(2, "query " + std::to_string(i) + " done");
  });
  Emitter em(cfg.output_path);
  for (const std::string& line : lines) em.raw(line);
  return 0;
}

int run_oracle_check(const RunConfig& cfg, Eigen::Index n, Eigen::Index d,
                     std::size_t trials) {
  validate_config(cfg);
  if (n < 2 || d < 1 || trials < 1)
    fail(ErrorCode::InvalidArgument, "oracle-check needs n >= 2, d >= 1, trials >= 1");
  const bool fixed_input = !cfg.input_path.empty();
  const double bound = approximation_bound(cfg.variant, cfg.epsilon);
  constexpr std::size_t kTrialsPerSet = 10;

  Emitter em(cfg.output_path);
  double max_factor = 0.0;
  bool all_ok = true;
  std::size_t done = 0;
  std::optional<PointSet> set;  // active instance; regenerated per batch
  std::optional<Engine> eng;    // unless the input is a fixed file
  while (done < trials) {
    const std::size_t set_id = done / kTrialsPerSet;
    std::mt19937_64 rng(query_seed(cfg.seed, set_id));
    if (!eng || !fixed_input) {
      set.emplace(fixed_input ? load_pointset(cfg.input_path)
                              : PointSet(random_points(rng, d, n)));
      eng.emplace(make_engine(cfg, *set));
    }
    const PointSet& P = *set;
    const std::size_t batch = std::min(kTrialsPerSet, trials - done);
    Matrix queries(P.dim(), static_cast<Eigen::Index>(batch));
    for (std::size_t t = 0; t < batch; ++t)
      queries.col(static_cast<Eigen::Index>(t)) =
          random_points(rng, P.dim(), 1, -1.5, 1.5).col(0);
    std::vector<ojson> records(batch);
    parallel_for(batch, cfg.threads, [&](std::size_t t) {
      const Vector q = queries.col(static_cast<Eigen::Index>(t));
      const QueryResult res = eng->run(q, query_seed(cfg.seed, done + t));
      const double oracle = oracle_distance(cfg.variant, P, cfg.k, q);
      const double factor = oracle > 1e-300 ? res.distance / oracle : 1.0;
      ojson j;
      j["trial"] = done + t;
      j["variant"] = cfg.variant;
      j["distance"] = res.distance;
      j["oracle"] = oracle;
      j["factor"] = factor;
      records[t] = std::move(j);
    });
    for (const ojson& j : records) {
      const double factor = j["factor"].get<double>();
      const double reported = j["distance"].get<double>();
      const double oracle = j["oracle"].get<double>();
      max_factor = std::max(max_factor, factor);
      if (reported > bound * oracle + 1e-9 || reported < oracle - 1e-9)
        all_ok = false;
      em.obj(j);
    }
    done += batch;
    logmsg(1, "oracle-check: " + std::to_string(done) + "/" +
                  std::to_string(trials) + " trials");
  }
  ojson summary;
  summary["trials"] = trials;
  summary["max_factor"] = max_factor;
  summary["bound"] = bound;
  summary["pass"] = all_ok;
  em.obj(summary);
  return all_ok ? 0 : 1;
}

int run_bench(const RunConfig& cfg, Eigen::Index d, const std::string& ns_text,
              std::size_t queries_per_n) {
  validate_config(cfg);
  const std::vector<std::int64_t> ns = parse_int_list(ns_text);
  if (ns.empty()) fail(ErrorCode::InvalidArgument, "bench needs at least one n");
  for (std::int64_t n : ns)
    if (n < 2) fail(ErrorCode::InvalidArgument, "bench sizes must be >= 2");
  if (queries_per_n < 1)
    fail(ErrorCode::InvalidArgument, "queries-per-n must be >= 1");

  Emitter em(cfg.output_path);
  std::vector<double> log_n, log_t;
  double sink = 0.0;
  for (std::int64_t n : ns) {
    std::mt19937_64 rng(query_seed(cfg.seed, static_cast<std::size_t>(n)));
    const PointSet P(random_points(rng, d, static_cast<Eigen::Index>(n)));
    const Engine eng = make_engine(cfg, P);
    Matrix queries(d, static_cast<Eigen::Index>(queries_per_n));
    for (std::size_t t = 0; t < queries_per_n; ++t)
      queries.col(static_cast<Eigen::Index>(t)) =
          random_points(rng, d, 1, -1.5, 1.5).col(0);
    double best_batch_ms = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      for (std::size_t t = 0; t < queries_per_n; ++t)
        sink += eng.run(queries.col(static_cast<Eigen::Index>(t)),
                        query_seed(cfg.seed, t))
                    .distance;
      best_batch_ms = std::min(best_batch_ms, ms_since(t0));
    }
    const double avg = best_batch_ms / static_cast<double>(queries_per_n);
    ojson j;
    j["n"] = n;
    j["build_ms"] = eng.build_ms;
    j["query_ms_avg"] = avg;
    j["queries"] = queries_per_n;
    em.obj(j);
    log_n.push_back(std::log(static_cast<double>(n)));
    log_t.push_back(std::log(std::max(avg, 1e-9)));
    logmsg(1, "bench n=" + std::to_string(n) + ": " + std::to_string(avg) +
                  " ms/query");
  }
  double slope = 0.0;
  if (ns.size() >= 2) {
    const double m = static_cast<double>(ns.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sx += log_n[i];
      sy += log_t[i];
      sxx += log_n[i] * log_n[i];
      sxy += log_n[i] * log_t[i];
    }
    slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  ojson summary;
  summary["sizes"] = ns;
  summary["slope"] = slope;
  summary["checksum"] = sink;
  em.obj(summary);
  return 0;
}

int run_reduce_ksum(const RunConfig& cfg, const std::string& numbers_text,
                    std::size_t trials) {
  validate_config(cfg);
  KSumInstance inst;
  inst.numbers = parse_int_list(numbers_text);
  inst.k = cfg.k;
  const std::size_t effective =
      trials == 0 ? ksum_default_trials(inst.k) : trials;
  const auto hit = solve_ksum(inst, cfg.epsilon, trials, cfg.seed);
  ojson j;
  j["command"] = "reduce-ksum";
  j["k"] = inst.k;
  j["n"] = inst.numbers.size();
  j["trials"] = effective;
  j["found"] = hit.has_value();
  ojson ids = ojson::array();
  ojson values = ojson::array();
  if (hit) {
    for (std::size_t id : *hit) {
      ids.push_back(id);
      values.push_back(inst.numbers[id]);
    }
  }
  j["witness_ids"] = std::move(ids);
  j["values"] = std::move(values);
  Emitter em(cfg.output_path);
  em.obj(j);
  return 0;
}

int run_reduce_hopcroft(const RunConfig& cfg, std::size_t limit) {
  validate_config(cfg);
  const PointSet P = load_pointset(cfg.input_path);
  if (P.dim() != 4)
    fail(ErrorCode::DimensionNot4, "hopcroft needs 4-dimensional points");
  if (P.size() < 4)
    fail(ErrorCode::TooFewPoints, "hopcroft needs at least 4 points");
  if (limit < 1) fail(ErrorCode::InvalidArgument, "limit must be >= 1");
  Emitter em(cfg.output_path);
  double max_err = 0.0;
  bool all_ok = true;
  std::size_t emitted = 0;
  for_each_subset(
      static_cast<std::size_t>(P.size()), 4,
      [&](const std::vector<std::size_t>& ids) {
        if (emitted >= limit) return;
        ++emitted;
        Eigen::Matrix4d M;
        for (int c = 0; c < 4; ++c)
          M.col(c) = P.col(static_cast<Eigen::Index>(ids[c]));
        const Vector u = hopcroft_lift_u(M.col(0), M.col(1));
        const Vector v = hopcroft_lift_v(M.col(2), M.col(3));
        const double det = M.determinant();
        const double dot = u.dot(v);
        const double err = std::abs(dot - det);
        max_err = std::max(max_err, err);
        if (err > 1e-9 * std::max(1.0, std::abs(det))) all_ok = false;
        ojson j;
        j["ids"] = ids;
        j["det"] = det;
        j["dot"] = dot;
        em.obj(j);
      });
  ojson summary;
  summary["quadruples"] = emitted;
  summary["max_abs_err"] = max_err;
  summary["pass"] = all_ok;
  em.obj(summary);
  return all_ok ? 0 : 1;
}

int run_reduce_degeneracy(const RunConfig& cfg) {
  validate_config(cfg);
  const PointSet P = load_pointset(cfg.input_path);
  const DegeneracyReport rep = detect_affine_degeneracy(
      P, cfg.epsilon, backend_from_name(cfg.backend), cfg.seed);
  ojson j;
  j["command"] = "reduce-degeneracy";
  j["degenerate"] = rep.degenerate;
  j["witness"] = rep.witness;
  Emitter em(cfg.output_path);
  em.obj(j);
  return 0;
}

void add_common_flags(CLI::App* sub, RunConfig* cfg) {
  sub->add_option("--variant", cfg->variant,
                  "slr|anlf|anif|anis|segment|segment-offline");
  sub->add_option("--k", cfg->k, "subset size (flats: 2..6, simplices: 2..5)");
  sub->add_option("--epsilon", cfg->epsilon, "approximation parameter, (0, 1]");
  sub->add_option("--backend", cfg->backend, "exact|tree");
  sub->add_option("--seed", cfg->seed, "root of all randomness");
  sub->add_option("--threads", cfg->threads, "query fan-out parallelism");
  sub->add_option("--output", cfg->output_path, "JSON Lines file (default stdout)");
  sub->add_option("--budget-structures", cfg->budget_structures,
                  "maximum substructure count");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nearest induced flats, simplices and segments"};
  app.require_subcommand(1);
  RunConfig cfg;

  Eigen::Index oc_n = 24, oc_d = 4, bench_d = 4;
  std::size_t oc_trials = 100, bench_queries = 20;
  std::size_t ksum_trials = 0, hopcroft_limit = 200;
  std::string bench_ns = "100,200,400,800", ksum_numbers;

  CLI::App* query = app.add_subcommand("query", "answer nearest-structure queries");
  query->add_option("--input", cfg.input_path, "point set (CSV or JSON)")
      ->required();
  query->add_option("--queries", cfg.queries_path, "query points (CSV or JSON)")
      ->required();
  add_common_flags(query, &cfg);

  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "compare a variant against exhaustive enumeration");
  oracle->add_option("--input", cfg.input_path,
                     "fixed point set (default: generated per set)");
  oracle->add_option("--n", oc_n, "generated set size");
  oracle->add_option("--d", oc_d, "generated dimension");
  oracle->add_option("--trials", oc_trials, "number of random queries");
  add_common_flags(oracle, &cfg);

  CLI::App* bench = app.add_subcommand("bench", "timings over a size grid");
  bench->add_option("--n", bench_ns, "comma-separated sizes");
  bench->add_option("--d", bench_d, "dimension");
  bench->add_option("--queries-per-n", bench_queries, "queries timed per size");
  add_common_flags(bench, &cfg);

  CLI::App* reduce = app.add_subcommand("reduce", "executable reductions");
  reduce->require_subcommand(1);
  CLI::App* ksum = reduce->add_subcommand("ksum", "zero-sum k-subset search");
  ksum->add_option("--numbers", ksum_numbers, "comma-separated integers")
      ->required();
  ksum->add_option("--trials", ksum_trials, "lift trials (0 = default)");
  add_common_flags(ksum, &cfg);
  CLI::App* hopcroft =
      reduce->add_subcommand("hopcroft", "point-line incidence lift check");
  hopcroft->add_option("--input", cfg.input_path, "4-dimensional point set")
      ->required();
  hopcroft->add_option("--limit", hopcroft_limit, "max quadruples");
  add_common_flags(hopcroft, &cfg);
  CLI::App* degeneracy =
      reduce->add_subcommand("degeneracy", "affine degeneracy detection");
  degeneracy->add_option("--input", cfg.input_path, "point set")->required();
  add_common_flags(degeneracy, &cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (query->parsed()) {
      cfg.command = "query";
      return run_query(cfg);
    }
    if (oracle->parsed()) {
      cfg.command = "oracle-check";
      return run_oracle_check(cfg, oc_n, oc_d, oc_trials);
    }
    if (bench->parsed()) {
      cfg.command = "bench";
      return run_bench(cfg, bench_d, bench_ns, bench_queries);
    }
    cfg.command = "reduce";
    if (ksum->parsed()) return run_reduce_ksum(cfg, ksum_numbers, ksum_trials);
    if (hopcroft->parsed()) return run_reduce_hopcroft(cfg, hopcroft_limit);
    return run_reduce_degeneracy(cfg);
  } catch (const GeomError& e) {
    ojson err;
    err["error"] = error_code_name(e.code());
    err["message"] = e.what();
    std::cout << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ojson err;
    err["error"] = "Internal";
    err["message"] = e.what();
    std::cout << err.dump() << "\n";
    return 1;
  }
}
