// mimply: command-line front end for derivations and r-DAG certificates.
//
// Exit codes
//   0   success (verify: correct tautology)
//   1   negative answer (prove: no proof; check-nd: invalid derivation;
//       verify: correct derivation with open assumptions)
//   2   verify: incorrect certificate
//   64  malformed input file or command line

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "mimply/mimply.hpp"

namespace {

using namespace mimply;

constexpr int kUsage = 64;

struct Malformed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Malformed("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Malformed("cannot write " + path);
}

Derivation load_derivation(const std::string& path) {
  try {
    return derivation_from_json(read_input(path));
  } catch (const FormatError& e) {
    throw Malformed(path + ": " + e.what());
  }
}

RDagProof load_rdag(const std::string& path) {
  try {
    return rdag_from_json(read_input(path));
  } catch (const FormatError& e) {
    throw Malformed(path + ": " + e.what());
  }
}

Formula parse_flag(const std::string& text) {
  try {
    return parse_formula(text);
  } catch (const ParseError& e) {
    throw Malformed(std::string("formula: ") + e.what());
  }
}

std::string set_str(const std::vector<Formula>& fs) {
  std::string s = "{";
  for (std::size_t i = 0; i < fs.size(); ++i) s += (i ? ", " : "") + fs[i].str();
  return s + "}";
}

// Summaries go to stderr when the artifact itself is written to stdout.
std::ostream& summary(const std::string& out_path) { return out_path == "-" ? std::cerr : std::cout; }

int cmd_parse(const std::string& text) {
  std::cout << parse_flag(text).str() << "\n";
  return 0;
}

int cmd_prove(const std::string& text, std::optional<std::size_t> max_depth, const std::string& out) {
  Formula f = parse_flag(text);
  std::size_t bound = max_depth.value_or(default_search_depth(f));
  auto p = proof_search(f, bound);
  if (!p) {
    std::cerr << "no proof of " << f.str() << " within height " << bound << "\n";
    return 1;
  }
  write_output(out, to_json(*p));
  summary(out) << "proof of " << f.str() << ": " << p->size() << " nodes, height " << height(*p) << "\n";
  return 0;
}

int cmd_check_nd(const std::string& in) {
  Derivation d = load_derivation(in);
  try {
    validate_derivation(d);
  } catch (const std::exception& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return 1;
  }
  std::cout << "valid derivation of " << conclusion(d).str() << "\n"
            << "open assumptions: " << set_str(open_assumptions(d)) << "\n"
            << "nodes: " << d.size() << "\n"
            << "normal: " << (is_normal(d) ? "yes" : "no") << "\n"
            << "expanded: " << (is_expanded(d) ? "yes" : "no") << "\n";
  return 0;
}

int cmd_compress(const std::string& in, const std::string& out, std::size_t min_count, std::size_t min_size) {
  Derivation d = load_derivation(in);
  CompressParams params;
  params.redundancy = RedundancyParams{min_count, min_size};
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw Malformed(e.what());
  }
  try {
    validate_derivation(d);
  } catch (const std::exception& e) {
    std::cerr << "invalid derivation: " << e.what() << "\n";
    return 1;
  }
  CompressStats st;
  RDagProof c = compress(d, params, &st);
  write_output(out, to_json(c));
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.2f", static_cast<double>(d.size()) / static_cast<double>(c.size()));
  summary(out) << "tree size: " << d.size() << "\n"
               << "dag size: " << c.size() << "\n"
               << "ratio: " << ratio << "\n"
               << "shared instances: " << st.detached << " in " << st.groups << " groups\n";
  return 0;
}

struct VerifyResult {
  int code = 0;
  std::string text;
};

VerifyResult verify_one(const std::string& path, bool steps) {
  VerifyResult r;
  std::ostringstream os;
  try {
    RDagProof c = load_rdag(path);
    Verdict v = check(c);
    os << path << ": " << outcome_name(v.outcome);
    if (v.root_entailment) os << "  " << to_string(v.root_entailment, c.order);
    os << "\n";
    switch (v.outcome) {
      case Outcome::CorrectTautology: r.code = 0; break;
      case Outcome::CorrectDerivation: r.code = 1; break;
      case Outcome::Incorrect: r.code = 2; break;
    }
    if (v.reason == Reason::Structural) {
      os << "reason: Structural (" << v.detail << ")\n";
    } else if (v.reason != Reason::None) {
      os << "reason: " << reason_name(v.reason) << "\n";
    }
    if (steps) {
      std::uint64_t nv = v.n_v;
      os << "steps: " << v.steps << "\n"
         << "bound: " << v.step_bound() << " (h=" << v.height << ", n_v=" << v.n_v << ", n_A=" << v.n_a << ")\n"
         << "n_v^4: " << nv * nv * nv * nv << "\n";
    }
  } catch (const std::exception& e) {
    os << "error: " << e.what() << "\n";
    r.code = kUsage;
  }
  r.text = os.str();
  return r;
}

int cmd_verify(const std::vector<std::string>& files, bool steps) {
  std::vector<std::future<VerifyResult>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(f == "-" ? std::launch::deferred : std::launch::async, verify_one, f, steps));
  }
  int code = 0;
  for (auto& j : jobs) {
    VerifyResult r = j.get();
    std::cout << r.text;
    code = std::max(code, r.code);
  }
  return code;
}

int cmd_stats(const std::string& in) {
  Derivation d = load_derivation(in);
  try {
    validate_derivation(d);
  } catch (const std::exception& e) {
    std::cerr << "invalid derivation: " << e.what() << "\n";
    return 1;
  }
  auto lv = levels(d);
  std::vector<std::size_t> width(height(d) + 1, 0);
  for (auto l : lv) ++width[l];
  auto groups = lri(d);
  std::cout << "nodes: " << d.size() << "\n"
            << "height: " << height(d) << "\n"
            << "levels: " << width.size() << "\n"
            << "widest level: " << *std::max_element(width.begin(), width.end()) << " nodes\n"
            << "branches: " << branches(d).size() << "\n"
            << "lri groups: " << groups.size() << "\n";
  for (const auto& g : groups) {
    std::cout << "  level " << g.level << ": " << g.roots.size() << " x " << g.size << " nodes concluding "
              << d.nodes[g.matrix].formula.str() << "\n";
  }
  return 0;
}

int cmd_gen_fib(std::size_t n, const std::string& out, bool closed) {
  if (n < 2) throw Malformed("-n must be at least 2");
  FibInstance f = closed ? fib_family_closed(n) : fib_family(n);
  write_output(out, to_json(f.derivation));
  summary(out) << (closed ? "closed " : "") << "fibonacci derivation of " << conclusion(f.derivation).str() << ": "
               << f.derivation.size() << " nodes\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof compression and checking for minimal implicational logic"};
  app.require_subcommand(1);

  std::string formula, in, out = "-";
  std::vector<std::string> files;
  std::size_t max_depth = 0, min_count = 2, min_size = 2, n = 0;
  bool steps = false, closed = false;

  auto* parse = app.add_subcommand("parse", "Print a formula in canonical form");
  parse->add_option("-f,--formula", formula, "Formula, e.g. \"A -> B -> A\"")->required();

  auto* prove = app.add_subcommand("prove", "Search for a normal proof and write it as JSON");
  prove->add_option("-f,--formula", formula)->required();
  auto* depth_opt = prove->add_option("--max-depth", max_depth, "Height bound (default 2*size+2)");
  prove->add_option("-o,--output", out, "Output file, - for stdout");

  auto* check_nd = app.add_subcommand("check-nd", "Validate a derivation and report normality");
  check_nd->add_option("proof", in, "Derivation JSON, - for stdin")->required();

  auto* comp = app.add_subcommand("compress", "Compress a derivation into an r-DAG certificate");
  comp->add_option("proof", in, "Derivation JSON, - for stdin")->required();
  comp->add_option("-o,--output", out, "Output file, - for stdout");
  comp->add_option("--min-count", min_count, "Instances needed to share a matrix")->check(CLI::PositiveNumber);
  comp->add_option("--min-size", min_size, "Nodes needed in a shared matrix")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Check r-DAG certificates");
  verify->add_option("certificates", files, "Certificate JSON files, - for stdin")->required();
  verify->add_flag("--steps", steps, "Print the step counter and its bounds");

  auto* stats = app.add_subcommand("stats", "Print height, levels, branches and repeated matrices");
  stats->add_option("proof", in, "Derivation JSON, - for stdin")->required();

  auto* gen = app.add_subcommand("gen-fib", "Write the Fibonacci derivation of p_n");
  gen->add_option("-n", n, "Index, at least 2")->required();
  gen->add_option("-o,--output", out, "Output file, - for stdout");
  gen->add_flag("--closed", closed, "Discharge every assumption");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*parse) return cmd_parse(formula);
    if (*prove) return cmd_prove(formula, *depth_opt ? std::optional<std::size_t>(max_depth) : std::nullopt, out);
    if (*check_nd) return cmd_check_nd(in);
    if (*comp) return cmd_compress(in, out, min_count, min_size);
    if (*verify) return cmd_verify(files, steps);
    if (*stats) return cmd_stats(in);
    if (*gen) return cmd_gen_fib(n, out, closed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
