#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskctl/common.hpp"
#include "riskctl/mdp.hpp"

/// Probabilistic guarded-command language: the subset of the PRISM modelling
/// language the controller generator targets.
namespace riskctl::gcl {

enum class ValueType { Int, Double, Bool };

const char* type_name(ValueType t) noexcept;

struct Value {
  ValueType type = ValueType::Int;
  std::int64_t i = 0;  // Int and Bool payload
  double d = 0.0;

  static Value of_int(std::int64_t v) { return Value{ValueType::Int, v, 0.0}; }
  static Value of_bool(bool v) { return Value{ValueType::Bool, v ? 1 : 0, 0.0}; }
  static Value of_double(double v) { return Value{ValueType::Double, 0, v}; }

  double as_double() const { return type == ValueType::Double ? d : static_cast<double>(i); }
  bool as_bool() const { return i != 0; }
  std::string str() const;
  bool operator==(const Value& o) const;
};

enum class Op {
  IntLit, DoubleLit, BoolLit, Ident, Label,
  Not, Neg,
  Mul, Div, Add, Sub,
  Lt, Le, Gt, Ge, Eq, Ne,
  And, Or, Iff, Implies,
  Ite
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::IntLit;
  std::string text;  // literal spelling, identifier, or label name
  std::vector<ExprPtr> args;
  SourcePos pos;
};

/// Binding strength, higher binds tighter (`?:` is 1, atoms are 12).
int precedence(Op op) noexcept;

/// Prints with the minimal parentheses required by operator precedence.
std::string to_string(const Expr& e);

ExprPtr parse_expression(std::string_view text, const std::string& file = "<expr>");

struct ConstDecl {
  std::string name;
  ValueType type = ValueType::Int;
  ExprPtr value;  // null when left undefined
  SourcePos pos;
};

struct VarDecl {
  std::string name;
  bool is_bool = false;
  ExprPtr low, high, init;  // init may be null (defaults to low / false)
  std::string module;       // empty for globals
  SourcePos pos;
};

struct Assignment {
  std::string var;
  ExprPtr value;
};

struct Branch {
  ExprPtr prob;  // null means 1
  std::vector<Assignment> updates;
};

struct Command {
  std::string action;
  ExprPtr guard;
  std::vector<Branch> branches;
  SourcePos pos;
};

struct Module {
  std::string name;
  std::vector<VarDecl> vars;
  std::vector<Command> commands;
  SourcePos pos;
};

struct NamedExpr {
  std::string name;
  ExprPtr expr;
  SourcePos pos;
};

struct RewardItem {
  std::optional<std::string> action;  // set for transition rewards ("" for `[]`)
  ExprPtr guard;
  ExprPtr value;
  SourcePos pos;
};

struct RewardDecl {
  std::string name;
  std::vector<RewardItem> items;
  SourcePos pos;
};

struct GclProgram {
  std::string model_type = "mdp";
  std::vector<ConstDecl> constants;
  std::vector<VarDecl> globals;
  std::vector<Module> modules;
  std::vector<NamedExpr> formulas;
  std::vector<NamedExpr> labels;
  std::vector<RewardDecl> rewards;
};

/// Parses program text. Throws ParseError for syntax errors and for
/// constructs outside the supported subset (named in the message).
GclProgram parse_gcl(std::string_view text, const std::string& file = "<model>");

/// Parses `(x'=e)&(y'=f)` or `true`.
std::vector<Assignment> parse_update(std::string_view text, const std::string& file = "<update>");

// ---------------------------------------------------------------------------
// Type-checked evaluation

struct Node {
  Op op = Op::IntLit;
  ValueType type = ValueType::Int;
  Value constant;
  std::size_t slot = 0;  // variable or label index
  std::vector<Node> args;
};

struct EvalContext {
  const int* vars = nullptr;
  const std::vector<std::vector<bool>>* labels = nullptr;
  std::size_t state = 0;
};

Value eval(const Node& n, const EvalContext& ctx);

struct CompiledCommand {
  std::size_t module = 0;
  std::optional<std::size_t> action;  // index into CompiledProgram::actions
  Node guard;
  struct Branch {
    Node prob;
    std::vector<std::pair<std::size_t, Node>> updates;
  };
  std::vector<Branch> branches;
  SourcePos pos;
};

/// A program with constants evaluated, formulas inlined and all names resolved.
class CompiledProgram {
 public:
  CompiledProgram(const GclProgram& program, const std::map<std::string, Value>& constants = {});

  const std::vector<VarInfo>& vars() const noexcept { return vars_; }
  const std::vector<std::string>& actions() const noexcept { return actions_; }
  const std::vector<CompiledCommand>& commands() const noexcept { return commands_; }
  const std::vector<std::string>& module_names() const noexcept { return modules_; }
  std::vector<int> initial_state() const { return init_; }
  std::optional<std::size_t> var_index(const std::string& name) const;

  /// Compiles an expression against this program's variables, constants and
  /// formulas. Label atoms resolve against `label_names` when given.
  Node compile(const Expr& e, const std::vector<std::string>* label_names = nullptr) const;

  struct Labelled {
    std::string name;
    Node expr;
  };
  const std::vector<Labelled>& labels() const noexcept { return labels_; }

  struct Reward {
    std::string name;
    struct Item {
      bool transition = false;
      std::string action;  // matched against Choice::action
      Node guard, value;
    };
    std::vector<Item> items;
  };
  const std::vector<Reward>& rewards() const noexcept { return rewards_; }

  const std::map<std::string, Value>& constants() const noexcept { return consts_; }

 private:
  Node compile_rec(const Expr& e, const std::vector<std::string>* labels,
                   std::vector<std::string>& expanding) const;

  std::map<std::string, Value> consts_;
  std::map<std::string, ExprPtr> formulas_;
  std::map<std::string, ExprPtr> label_exprs_;
  std::map<std::string, std::size_t> var_slots_;
  std::vector<VarInfo> vars_;
  std::vector<std::string> var_modules_;
  std::vector<int> init_;
  std::vector<std::string> modules_;
  std::vector<std::string> actions_;
  std::vector<CompiledCommand> commands_;
  std::vector<Labelled> labels_;
  std::vector<Reward> rewards_;
};

struct BuildOptions {
  std::size_t state_cap = 1'000'000;
  std::map<std::string, Value> constants;
};

/// Explicit reachable state space under synchronous-product semantics.
Mdp build_state_space(const GclProgram& program, const BuildOptions& options = {});

/// Evaluates `expr` in the given valuation (variables not mentioned take their
/// initial value).
Value eval_expr(const GclProgram& program, const std::map<std::string, int>& valuation,
                std::string_view expr);

}  // namespace riskctl::gcl
