#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pingpong/cli/commands.hpp"
#include "pingpong/error.hpp"

using pingpong::Error;
using pingpong::ErrorCode;
using namespace pingpong::cli;

namespace {

json read_document(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    buf << in.rdbuf();
  }
  try {
    return json::parse(buf.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

void write_document(const json& doc, const std::string& path) {
  std::string const text = doc.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::vector<pingpong::places::Place> parse_places(const std::string& list) {
  std::vector<pingpong::places::Place> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(pingpong::places::Place::parse(item));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad place '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ping-pong certificates for free subgroups of SL_d over S-integers"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string input = "-";
  std::string output;
  std::string places;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", input, "input JSON (- for stdin)");
    sub->add_option("--output", output, "output JSON (default stdout)");
    sub->add_option("--precision-bits", cfg.precision_bits, "working precision at infinity");
    sub->add_option("--padic-digits", cfg.padic_digits, "p-adic digits");
    sub->add_option_function<std::size_t>(
        "--max-word-len",
        [&](const std::size_t& v) {
          cfg.max_word_len = v;
          cfg.max_word_len_set = true;
        },
        "word-length budget; growth radius for growth");
    sub->add_option("--exponent-cap", cfg.exponent_cap, "cap on doubled exponents");
    sub->add_option("--grid-cap", cfg.grid_cap, "grid cells for contraction checks");
    sub->add_option("--oracle-depth", cfg.oracle_depth, "reduced-word oracle depth");
    sub->add_option("--seed", cfg.seed, "seed for the conjugator search");
    sub->add_option("--places", places, "comma list of places, e.g. inf,2");
  };
  auto* analyze = app.add_subcommand("analyze", "modulus gaps and pivot selection");
  auto* certify = app.add_subcommand("certify-free", "search for a certified free pair");
  auto* verify = app.add_subcommand("verify-cert", "replay a certificate file");
  auto* compare = app.add_subcommand("compare", "norm / spectral-radius comparison");
  auto* growth = app.add_subcommand("growth", "ball sizes and growth rate");
  for (auto* sub : {analyze, certify, verify, compare, growth}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int const rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorCode::ParseError);
  }

  std::optional<InputSpec> spec;
  try {
    if (!places.empty()) cfg.places = parse_places(places);
    json const doc = read_document(input);
    json result;
    if (*analyze) {
      spec = parse_input(doc);
      result = cmd_analyze(*spec, cfg);
    } else if (*certify) {
      spec = parse_input(doc);
      result = cmd_certify_free(*spec, cfg);
    } else if (*verify) {
      result = cmd_verify_cert(doc, cfg);
    } else if (*compare) {
      spec = parse_input(doc);
      result = cmd_compare(*spec, cfg);
    } else {
      result = cmd_growth(doc, cfg.max_word_len_set ? cfg.max_word_len : 8);
    }
    write_document(result, output);
    return 0;
  } catch (const pingpong::construct::NotFoundError& e) {
    write_document(not_found_report(*spec, e.diagnoses()), output);
    std::cerr << e.what() << "\n";
    return exit_code(ErrorCode::NotFound);
  } catch (const Error& e) {
    write_document(error_report(e.code(), e.what()), output);
    std::cerr << e.what() << "\n";
    return exit_code(e.code());
  } catch (const json::exception& e) {
    write_document(error_report(ErrorCode::ParseError, e.what()), output);
    std::cerr << e.what() << "\n";
    return exit_code(ErrorCode::ParseError);
  } catch (const std::exception& e) {
    json report = error_report(ErrorCode::PreconditionViolated, e.what());
    report["status"] = "Error";
    std::cerr << e.what() << "\n";
    try {
      write_document(report, output);
    } catch (const std::exception&) {
    }
    return 1;
  }
}
