// cohnet: command-line front end.
// Exit status: 0 ok, 1 a check failed (witness printed), 2 usage or input error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cohnet/constructions.hpp"
#include "cohnet/nn.hpp"

namespace {

using namespace cohnet;

struct CheckFailed {};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text))
    throw Error("cannot write '" + path + "'");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    spit(path, text);
}

[[noreturn]] void fail(const std::string& report) {
  std::cout << report << "\n";
  throw CheckFailed{};
}

struct NnArgs {
  std::string arch;
  std::string format = "s1e2m1";
  std::string params;
  std::string constraints;
  std::string out;
};

void add_network_options(CLI::App* cmd, NnArgs& a) {
  cmd->add_option("--arch", a.arch, "architecture, e.g. 2-relu-2-id-1")->required();
  cmd->add_option("--float", a.format, "float format s1e<E>m<M>[:sat|:nan]");
  cmd->add_option("--constraints", a.constraints, "tie/fix constraint file");
}

struct Network {
  Architecture arch;
  FloatTables tables;
  NetworkTheory theory;
};

Network load_network(const NnArgs& a) {
  Network n{parse_architecture(a.arch), build_tables(parse_float_format(a.format)), {}};
  n.theory = network_theory(n.arch, n.tables);
  if (!a.constraints.empty()) {
    auto cs = parse_constraints(slurp(a.constraints));
    check_constraints(n.arch, n.tables, cs);
    n.theory = apply_constraints(n.theory, cs);
  }
  return n;
}

SetStructure checked_model(const Network& n, const NnArgs& a, unsigned jobs) {
  SetStructure m = build_model(n.theory, n.tables, parse_params(slurp(a.params)));
  auto r = check_model(m, n.theory.theory, jobs);
  if (!r.valid())
    fail("invalid: " + describe(n.theory.theory, *r.witness));
  return m;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"coherent theories of finite sets, schemas and small-float networks"};
  app.require_subcommand(1);
  unsigned jobs = 1;
  app.add_option("--jobs", jobs, "parallel axiom checks")->check(CLI::PositiveNumber);

  std::string schema_path, instance_path, theory_path, model_path, model_out;

  auto* schema = app.add_subcommand("schema", "schema commands");
  schema->require_subcommand(1);
  auto* schema_check = schema->add_subcommand("check", "functoriality of an instance");
  schema_check->add_option("schema", schema_path, "schema file")->required();
  schema_check->add_option("instance", instance_path, "instance file")->required();
  auto* schema_theory = schema->add_subcommand("to-theory", "print the theory of a schema");
  schema_theory->add_option("schema", schema_path, "schema file")->required();

  auto* hardcode = app.add_subcommand("hardcode", "print the hard-coded theory of an instance");
  hardcode->add_option("schema", schema_path, "schema file")->required();
  hardcode->add_option("instance", instance_path, "instance file")->required();
  hardcode->add_option("--model", model_out, "also write the defining structure here");

  auto* theory = app.add_subcommand("theory", "theory commands");
  theory->require_subcommand(1);
  auto* theory_check = theory->add_subcommand("check", "check a structure against a theory");
  theory_check->add_option("theory", theory_path, "theory file")->required();
  theory_check->add_option("model", model_path, "structure file")->required();

  NnArgs nn_args;
  auto* nn = app.add_subcommand("nn", "network commands");
  nn->require_subcommand(1);
  auto* nn_build = nn->add_subcommand("build", "write <out>.theory, <out>.interp, <out>.rspan.theory");
  add_network_options(nn_build, nn_args);
  nn_build->add_option("--out", nn_args.out, "output prefix")->required();
  auto* nn_check = nn->add_subcommand("check", "check a parameter model");
  add_network_options(nn_check, nn_args);
  nn_check->add_option("--params", nn_args.params, "parameter JSON file")->required();
  auto* nn_infer = nn->add_subcommand("infer", "inference by precomposition");
  add_network_options(nn_infer, nn_args);
  nn_infer->add_option("--params", nn_args.params, "parameter JSON file")->required();
  nn_infer->add_option("--out", nn_args.out, "dataset file, '-' for stdout")->required();
  auto* nn_oracle = nn->add_subcommand("oracle", "direct evaluation");
  add_network_options(nn_oracle, nn_args);
  nn_oracle->add_option("--params", nn_args.params, "parameter JSON file")->required();
  nn_oracle->add_option("--out", nn_args.out, "dataset file, '-' for stdout")->required();

  std::string left_path, right_path;
  auto* dataset = app.add_subcommand("dataset", "dataset commands");
  dataset->require_subcommand(1);
  auto* diff = dataset->add_subcommand("diff", "exit 0 iff the datasets are identical");
  diff->add_option("a", left_path, "dataset file")->required();
  diff->add_option("b", right_path, "dataset file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*schema_check) {
      CategoryPresentation d = parse_schema(slurp(schema_path));
      Instance inst = parse_instance(slurp(instance_path), d);
      if (auto v = check_functorial(inst))
        fail("not functorial: " + v->message);
      std::cout << "functorial\n";
    } else if (*schema_theory) {
      std::cout << print_theory(schema_to_theory(parse_schema(slurp(schema_path))));
    } else if (*hardcode) {
      CategoryPresentation d = parse_schema(slurp(schema_path));
      Instance inst = parse_instance(slurp(instance_path), d);
      if (auto v = check_functorial(inst))
        fail("not functorial: " + v->message);
      std::cout << print_theory(hard_code(inst));
      if (!model_out.empty())
        spit(model_out, print_structure(hard_code_model(inst)));
    } else if (*theory_check) {
      Theory thy = parse_theory(slurp(theory_path));
      sort_check(thy);
      SetStructure m = parse_structure(slurp(model_path), thy.signature);
      auto r = check_model(m, thy, jobs);
      if (!r.valid())
        fail("invalid: " + describe(thy, *r.witness));
      std::cout << "valid\n";
    } else if (*nn_build) {
      Network n = load_network(nn_args);
      spit(nn_args.out + ".theory", print_theory(n.theory.theory));
      spit(nn_args.out + ".rspan.theory", print_theory(n.theory.rspan));
      spit(nn_args.out + ".interp", print_interpretation(n.theory.iota));
    } else if (*nn_check) {
      Network n = load_network(nn_args);
      checked_model(n, nn_args, jobs);
      std::cout << "valid\n";
    } else if (*nn_infer) {
      Network n = load_network(nn_args);
      SetStructure m = checked_model(n, nn_args, jobs);
      PrecomposeOptions opts;
      opts.check_target = false;
      opts.jobs = jobs;
      emit(nn_args.out, print_dataset(infer(n.theory, m, n.tables, opts)));
    } else if (*nn_oracle) {
      Network n = load_network(nn_args);
      ParamAssignment p = parse_params(slurp(nn_args.params));
      if (!nn_args.constraints.empty()) {
        auto cs = parse_constraints(slurp(nn_args.constraints));
        if (!satisfies(p, cs))
          fail("parameters violate the constraints");
      }
      emit(nn_args.out, print_dataset(oracle_dataset(n.arch, n.tables, p)));
    } else if (*diff) {
      SpanDataset a = parse_dataset(slurp(left_path));
      SpanDataset b = parse_dataset(slurp(right_path));
      if (auto r = first_difference(a, b)) {
        std::ostringstream msg;
        msg << "datasets differ at row " << *r;
        if (a.format == b.format && a.n == b.n && a.m == b.m) {
          auto row = [&](const SpanDataset& d) {
            if (*r >= d.rows())
              return std::string("(missing)");
            std::string s;
            for (auto x : d.input(*r))
              s += pattern_string(x) + " ";
            s += "->";
            for (auto y : d.output(*r))
              s += " " + pattern_string(y);
            return s;
          };
          msg << "\n< " << row(a) << "\n> " << row(b);
        } else {
          msg << " (headers differ)";
        }
        fail(msg.str());
      }
      std::cout << "identical\n";
    }
  } catch (const CheckFailed&) {
    return 1;
  } catch (const PrecomposeError& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
