#include <atomic>
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "shiwa/benchmark.hpp"
#include "shiwa/combinators.hpp"
#include "shiwa/local_search.hpp"
#include "shiwa/optimizers.hpp"
#include "shiwa/selector.hpp"

namespace shiwa {

namespace {

using Builder = OptimizerPtr (*)(const ProblemDescriptor&, std::uint64_t);

OptimizerOptions budgeted(const ProblemDescriptor& d) {
  OptimizerOptions o;
  o.budget = d.budget;
  return o;
}

struct Named {
  const char* name;
  Builder build;
};

const Named kRegistry[] = {
    {"shiwa", [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr { return make_shiwa(d, s); }},
    {"cma",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_cma(d.dimension, s, std::nullopt, budgeted(d));
     }},
    {"de", [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr { return make_de(d.dimension, s, budgeted(d)); }},
    {"pso",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr { return make_pso(d.dimension, s, budgeted(d)); }},
    {"one_plus_one",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_one_plus_one_es(d.dimension, s, budgeted(d));
     }},
    {"cobyla",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_cobyla_like(d.dimension, s, std::nullopt, budgeted(d));
     }},
    {"powell",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_powell(d.dimension, s, std::nullopt, budgeted(d));
     }},
    {"tbpsa",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_tbpsa(d.dimension, s, true, budgeted(d));
     }},
    {"naive_tbpsa",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_tbpsa(d.dimension, s, false, budgeted(d));
     }},
    {"metarecentering",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_metarecentering(d.dimension, d.budget, d.parallelism, s);
     }},
    {"random",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return make_random_search(d.dimension, s, budgeted(d));
     }},
    {"memetic",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr { return memetic_chain(d.dimension, d.budget, s); }},
    {"big_budget",
     [](const ProblemDescriptor& d, std::uint64_t s) -> OptimizerPtr {
       return big_budget_leaf(d.dimension, d.budget, s);
     }},
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kResultsHeader =
    "benchmark,function,dimension,budget,parallelism,rotated,noisy,optimizer,seed,loss,status";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_unsigned(const std::string& text, std::size_t line, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw CsvError(line, std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& text, std::size_t line, const char* what) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw CsvError(line, std::string("invalid ") + what + " '" + text + "'");
}

double parse_double(const std::string& text, std::size_t line) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw CsvError(line, "invalid loss '" + text + "'");
  }
  return value;
}

}  // namespace

const std::vector<std::string>& optimizer_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Named& n : kRegistry) out.emplace_back(n.name);
    return out;
  }();
  return names;
}

OptimizerPtr make_named_optimizer(std::string_view name, const ProblemDescriptor& descriptor, std::uint64_t seed) {
  for (const Named& n : kRegistry) {
    if (name == n.name) return n.build(descriptor, seed);
  }
  throw UnknownName("unknown optimizer '" + std::string(name) + "'");
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Timeout: return "timeout";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t cell_index, std::size_t repetition) {
  return derive_seed(derive_seed(master, cell_index), repetition);
}

std::uint64_t optimizer_seed(std::uint64_t instance, std::string_view optimizer) {
  return derive_seed(instance, stable_hash(optimizer));
}

ResultRow run_single(const ProblemInstance& prototype, const std::string& optimizer, double timeout_seconds) {
  const Cell& cell = prototype.cell;
  ResultRow row{cell.benchmark, cell.function, cell.dimension, cell.budget, cell.parallelism,
                cell.rotated,   cell.noisy,    optimizer,      prototype.seed, std::numeric_limits<double>::quiet_NaN(),
                RunStatus::Failed};
  ProblemInstance instance = prototype;
  try {
    const auto descriptor = ProblemDescriptor::continuous(cell.dimension, cell.budget, cell.parallelism, cell.noisy);
    OptimizerPtr opt = make_named_optimizer(optimizer, descriptor, optimizer_seed(prototype.seed, optimizer));
    const auto start = std::chrono::steady_clock::now();
    const auto limit = std::chrono::duration<double>(timeout_seconds);
    std::vector<Candidate> batch;
    std::size_t done = 0;
    while (done < cell.budget) {
      const std::size_t n = std::min(cell.parallelism, cell.budget - done);
      batch.clear();
      for (std::size_t i = 0; i < n; ++i) batch.push_back(opt->ask());
      for (const Candidate& c : batch) opt->tell(c, instance.evaluate(c.point));
      done += n;
      if (std::chrono::steady_clock::now() - start > limit) {
        row.status = RunStatus::Timeout;
        return row;
      }
    }
    row.loss = instance.evaluate_noise_free(opt->recommend().point);
    row.status = std::isnan(row.loss) ? RunStatus::Failed : RunStatus::Ok;
  } catch (const std::exception&) {
    row.status = RunStatus::Failed;
    row.loss = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(std::size_t, std::size_t)>& progress) {
  const BenchmarkSpec& spec = find_benchmark(config.benchmark);
  if (config.optimizers.empty()) throw UnknownName("no optimizer given");
  for (const std::string& name : config.optimizers) {
    if (std::find(optimizer_names().begin(), optimizer_names().end(), name) == optimizer_names().end()) {
      throw UnknownName("unknown optimizer '" + name + "'");
    }
  }
  if (config.repetitions < 1) throw Error("repetitions must be at least 1");

  const std::vector<Cell> all = grid_cells(spec);
  std::vector<std::size_t> cells;
  if (config.cell_filter.empty()) {
    for (std::size_t i = 0; i < all.size(); ++i) cells.push_back(i);
  } else {
    for (std::size_t i : config.cell_filter) {
      if (i >= all.size()) throw GridViolation("cell index " + std::to_string(i) + " is out of range");
      cells.push_back(i);
    }
  }

  const std::size_t tasks = cells.size() * config.repetitions;
  const std::size_t k = config.optimizers.size();
  std::vector<ResultRow> rows(tasks * k);
  std::atomic<std::size_t> next{0};
  std::size_t finished = 0;
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t cell_index = cells[t / config.repetitions];
      const std::size_t rep = t % config.repetitions;
      const ProblemInstance instance = make_instance(all[cell_index], instance_seed(config.seed, cell_index, rep));
      for (std::size_t o = 0; o < k; ++o) {
        rows[t * k + o] = run_single(instance, config.optimizers[o], config.timeout_seconds);
      }
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(++finished, tasks);
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, tasks));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << "\n";
  for (const ResultRow& r : rows) {
    out << r.benchmark << ',' << r.function << ',' << r.dimension << ',' << r.budget << ',' << r.parallelism << ','
        << (r.rotated ? "true" : "false") << ',' << (r.noisy ? "true" : "false") << ',' << r.optimizer << ','
        << r.seed << ',' << format_double(r.loss) << ',' << to_string(r.status) << "\n";
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line)) throw CsvError(1, "empty file, expected a header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) throw CsvError(1, "unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 11) {
      throw CsvError(number, "expected 11 fields, found " + std::to_string(f.size()));
    }
    ResultRow r;
    r.benchmark = f[0];
    r.function = f[1];
    r.dimension = parse_unsigned<std::size_t>(f[2], number, "dimension");
    r.budget = parse_unsigned<std::size_t>(f[3], number, "budget");
    r.parallelism = parse_unsigned<std::size_t>(f[4], number, "parallelism");
    r.rotated = parse_bool(f[5], number, "rotated flag");
    r.noisy = parse_bool(f[6], number, "noisy flag");
    r.optimizer = f[7];
    if (r.optimizer.empty()) throw CsvError(number, "empty optimizer name");
    r.seed = parse_unsigned<std::uint64_t>(f[8], number, "seed");
    r.loss = parse_double(f[9], number);
    if (f[10] == "ok") {
      r.status = RunStatus::Ok;
    } else if (f[10] == "timeout") {
      r.status = RunStatus::Timeout;
    } else if (f[10] == "failed") {
      r.status = RunStatus::Failed;
    } else {
      throw CsvError(number, "invalid status '" + f[10] + "'");
    }
    if (r.status == RunStatus::Ok && std::isnan(r.loss)) throw CsvError(number, "ok row without a loss");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace shiwa
