// spfar: build, query, verify, generate, and benchmark farthest-point
// structures on two-terminal series-parallel networks.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spfar/testkit.hpp"

using namespace spfar;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitInvalidQuery = 3;
constexpr int kExitNotSp = 4;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SPFAR_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 1;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_network(in);
}

// Lambda as "a/b" or a decimal with at most six digits; returns the exact
// offset on an edge of weight w or throws InvalidQuery.
Length lambda_offset(const std::string& text, Length w) {
  Length num = 0, den = 0;
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    try {
      num = std::stoll(text.substr(0, slash));
      den = std::stoll(text.substr(slash + 1));
    } catch (const std::exception&) {
      throw ParseError("malformed lambda '" + text + "'");
    }
  } else {
    num = parse_decimal_weight(text);
    den = kScale;
  }
  if (den <= 0 || num < 0 || num > den)
    throw InvalidQuery("lambda outside [0,1]");
  if (w % den != 0 && (w * num) % den != 0)
    throw InvalidQuery("lambda not representable on this edge");
  Length off = w / den * num + w % den * num / den;
  if (off % 2 != 0)
    throw InvalidQuery("lambda lands between representable points");
  return off;
}

std::string lambda_text(const Network& net, PointOnEdge pt, bool decimal) {
  Length w = net.edge(pt.edge).w;
  if (decimal) {
    // Exact when the reduced denominator divides the scale; otherwise a
    // 12-digit approximation (fractions stay available by default).
    long double lam = (long double)pt.offset / (long double)w;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12Lg", lam);
    return buf;
  }
  Length g = std::gcd(pt.offset, w);
  Length num = g ? pt.offset / g : 0, den = g ? w / g : 1;
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

void print_result(std::ostream& out, const Network& net,
                  const FarthestResult& r, bool points, bool decimal) {
  out << "distance " << format_decimal(r.distance) << "\n";
  if (!points) return;
  out << "k " << r.points.size() << "\n";
  for (PointOnEdge pt : r.points)
    out << pt.edge << " " << lambda_text(net, pt, decimal) << "\n";
}

NetClass parse_class(const std::string& name) {
  if (name == "pp" || name == "parallelpath") return NetClass::ParallelPath;
  if (name == "beadchain" || name == "bc") return NetClass::BeadChain;
  if (name == "abacus" || name == "ab") return NetClass::Abacus;
  if (name == "sp" || name == "seriesparallel")
    return NetClass::SeriesParallel;
  throw CLI::ValidationError("--class",
                             "expected pp|beadchain|abacus|sp, got " + name);
}

// Size-bounded GenSpec for instance i of a verify sweep.
GenSpec sweep_spec(NetClass cls, int size, std::uint64_t seed, int i) {
  std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (i + 1));
  int smax = std::max(1, size / 2 - 1);
  int s = std::uniform_int_distribution<int>(0, smax)(rng);
  int p = std::uniform_int_distribution<int>(1, std::max(1, s / 2 + 1))(rng);
  if (s == 0) p = 0;
  return {seed + (std::uint64_t)i, cls, s, p};
}

int cmd_build(const std::string& file, const std::string& dump) {
  Network net = load_network(file);
  AbacusTree T = decompose(net);
  std::cout << "n " << net.vertex_count() << " m " << net.edge_count()
            << "\nterminals " << T.history.u << " " << T.history.v
            << "\nserialism " << T.history.s << " parallelism " << T.history.p
            << "\nnodes " << T.nodes.size() << "\n";
  if (!dump.empty()) {
    std::ofstream out(dump);
    out << "position,value,owner\n";
    const SPNode& root = T.nodes[0];
    if (root.has_global) {
      const Envelope& u1 = root.global.u1;
      for (std::size_t k = 0; k < u1.xs.size(); ++k)
        for (const EnvAtt& at : u1.attainers_at(u1.xs[k]))
          out << format_decimal(u1.xs[k] / 8) << ","
              << format_decimal(u1.vs[k] / 8) << "," << at.owner << "\n";
    }
    std::cout << "envelope " << dump << "\n";
  }
  return 0;
}

int cmd_query(const std::string& file, int edge, const std::string& lambda,
              bool points, const std::string& engine, bool decimal) {
  Network net = load_network(file);
  if (edge < 0 || edge >= net.edge_count())
    throw InvalidQuery("edge id out of range");
  Length off = lambda_offset(lambda, net.edge(edge).w);
  PointOnEdge q = make_point(net, edge, off);
  FarthestResult r;
  if (engine == "oracle") {
    r = oracle_farthest(net, q);
  } else {
    AbacusTree T = decompose(net);
    r = farthest_points_sp(T, q);
  }
  print_result(std::cout, net, r, points, decimal);
  return 0;
}

int cmd_verify(NetClass cls, int count, int size, std::uint64_t seed,
               int samples) {
  std::cout << "seed " << seed << "\n";
  int ok = 0;
  bool failed = false;
  for (int i = 0; i < count; ++i) {
    GenSpec g = sweep_spec(cls, size, seed, i);
    GeneratedNetwork gen = generate_full(g);
    FastEngine eng = build_structure(gen);
    EquivalenceReport rep = check_equivalence(gen, eng, samples, g.seed + 1);
    if (rep.ok()) {
      ++ok;
      continue;
    }
    failed = true;
    for (const MismatchWitness& w : rep.mismatches) {
      std::cout << "mismatch instance " << i << " seed " << g.seed << "\n";
      write_network(std::cout, gen.net);
      std::cout << "query " << w.q.edge << " "
                << lambda_text(gen.net, w.q, false) << "\nwant "
                << format_decimal(w.want.distance) << " got "
                << format_decimal(w.got.distance) << "\n";
    }
  }
  std::cout << ok << "/" << count << " ok\n";
  return failed ? 1 : 0;
}

int cmd_gen(NetClass cls, int s, int p, std::uint64_t seed,
            const std::string& out_file) {
  GenSpec g{seed, cls, s, p};
  Network net = generate(g);
  if (out_file.empty()) {
    write_network(std::cout, net);
  } else {
    std::ofstream out(out_file);
    write_network(out, net);
    std::cout << "seed " << seed << " n " << net.vertex_count() << " m "
              << net.edge_count() << " -> " << out_file << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& file, NetClass cls, int s, int p,
              std::uint64_t seed, int queries) {
  using Clock = std::chrono::steady_clock;
  Network net = file.empty() ? generate({seed, cls, s, p})
                             : load_network(file);
  std::cout << "seed " << seed << " n " << net.vertex_count() << " m "
            << net.edge_count() << "\n";
  auto t0 = Clock::now();
  AbacusTree T = decompose(net);
  auto t1 = Clock::now();
  std::cout << "build_ms "
            << std::chrono::duration<double, std::milli>(t1 - t0).count()
            << "\n";
  std::mt19937_64 rng(seed);
  std::vector<double> ns(queries);
  std::vector<long long> probes(queries);
  long long kmax = 0;
  for (int i = 0; i < queries; ++i) {
    EdgeId e = (EdgeId)(rng() % net.edge_count());
    Length w = net.edge(e).w;
    PointOnEdge q = make_point(net, e, 2 * ((Length)(rng() % (w / 2 + 1))));
    ProbeScope scope;
    auto q0 = Clock::now();
    FarthestResult r = farthest_points_sp(T, q);
    auto q1 = Clock::now();
    ns[i] = std::chrono::duration<double, std::nano>(q1 - q0).count();
    probes[i] = scope.used();
    kmax = std::max(kmax, (long long)r.points.size());
  }
  auto pct = [](std::vector<double>& v, double f) {
    std::sort(v.begin(), v.end());
    return v[std::min(v.size() - 1, (std::size_t)(f * v.size()))];
  };
  std::vector<double> pr(probes.begin(), probes.end());
  std::cout << "queries " << queries << " kmax " << kmax << "\n";
  std::cout << "query_ns_median " << pct(ns, 0.5) << " query_ns_95p "
            << pct(ns, 0.95) << "\n";
  std::cout << "probes_median " << pct(pr, 0.5) << " probes_95p "
            << pct(pr, 0.95) << " probes_max " << pr.back() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"farthest-point queries on series-parallel networks"};
  app.require_subcommand(1);

  std::string file, lambda, engine = "fast", cls_name = "sp", out_file, dump;
  int edge = 0, count = 10, size = 40, samples = 50, s = 4, p = 2;
  int queries = 1000;
  std::uint64_t seed = default_seed();
  bool points = false, decimal = false;

  CLI::App* cb = app.add_subcommand("build", "build and summarize");
  cb->add_option("file", file)->required();
  cb->add_option("--dump-envelope", dump, "CSV of (position,value,owner)");

  CLI::App* cq = app.add_subcommand("query", "farthest distance/points");
  cq->add_option("file", file)->required();
  cq->add_option("edge", edge)->required();
  cq->add_option("lambda", lambda)->required();
  cq->add_flag("--points", points, "also print the farthest points");
  cq->add_option("--engine", engine)->check(CLI::IsMember({"fast", "oracle"}));
  cq->add_flag("--decimal", decimal, "print lambdas as decimals");

  CLI::App* cv = app.add_subcommand("verify", "oracle-equivalence sweep");
  cv->add_option("--class", cls_name);
  cv->add_option("--count", count);
  cv->add_option("--size", size, "rough vertex budget");
  cv->add_option("--seed", seed);
  cv->add_option("--samples", samples, "interior samples per network");

  CLI::App* cg = app.add_subcommand("gen", "emit a random network");
  cg->add_option("--class", cls_name);
  cg->add_option("--s", s);
  cg->add_option("--p", p);
  cg->add_option("--seed", seed);
  cg->add_option("--out", out_file);

  CLI::App* cn = app.add_subcommand("bench", "build/query timings");
  cn->add_option("--net", file);
  cn->add_option("--class", cls_name);
  cn->add_option("--s", s);
  cn->add_option("--p", p);
  cn->add_option("--seed", seed);
  cn->add_option("--queries", queries);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (cb->parsed()) return cmd_build(file, dump);
    if (cq->parsed())
      return cmd_query(file, edge, lambda, points, engine, decimal);
    if (cv->parsed())
      return cmd_verify(parse_class(cls_name), count, size, seed, samples);
    if (cg->parsed())
      return cmd_gen(parse_class(cls_name), s, p, seed, out_file);
    return cmd_bench(file, parse_class(cls_name), s, p, seed, queries);
  } catch (const InvalidQuery& e) {
    std::cerr << "invalid query: " << e.what() << "\n";
    return kExitInvalidQuery;
  } catch (const NotSeriesParallel& e) {
    std::cerr << "not series-parallel: " << e.what() << "\n";
    return kExitNotSp;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const BuildError& e) {
    std::cerr << "build error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitParse;
  }
}
