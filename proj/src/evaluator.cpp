#include "jacobi/evaluator.hpp"

#include <cmath>
#include <unordered_map>

#include "jacobi/detail/eval_ops.hpp"
#include "jacobi/errors.hpp"

namespace jacobi {

// Per-compilation map from node identity to slot index.
struct Tape::CompileState {
  std::unordered_map<const Node*, std::uint32_t> slots;
};

Tape::Tape(std::vector<Expression> roots, const Chart& chart) : roots_(std::move(roots)) {
  CompileState state;
  state.slots.reserve(1024);
  root_slots_.reserve(roots_.size());
  for (const Expression& r : roots_) {
    root_slots_.push_back(compile(r, chart, state));
  }
}

std::uint32_t Tape::compile(const Expression& e, const Chart& chart, CompileState& st) {
  auto it = st.slots.find(e.node());
  if (it != st.slots.end()) return it->second;

  Instr ins{};
  switch (e.kind()) {
    case NodeKind::Constant:
      ins.op = Op::Const;
      ins.cval = e.number().value();
      break;
    case NodeKind::Variable: {
      auto idx = chart.index_of(e.name());
      if (!idx) throw UnknownIdentifier(e.name());
      ins.op = Op::Var;
      ins.a = static_cast<std::uint32_t>(*idx);
      break;
    }
    case NodeKind::Sum:
      ins.op = Op::Add;
      ins.a = compile(e.left(), chart, st);
      ins.b = compile(e.right(), chart, st);
      break;
    case NodeKind::Product:
      ins.op = Op::Mul;
      ins.a = compile(e.left(), chart, st);
      ins.b = compile(e.right(), chart, st);
      break;
    case NodeKind::Quotient:
      ins.op = Op::Div;
      ins.a = compile(e.left(), chart, st);
      ins.b = compile(e.right(), chart, st);
      break;
    case NodeKind::Power: {
      Expression ex = e.right();
      if (ex.is_constant() && ex.number().is_integer()) {
        ins.op = Op::PowInt;
        ins.a = compile(e.left(), chart, st);
        ins.ipow = ex.number().num();
      } else {
        ins.op = Op::Pow;
        ins.a = compile(e.left(), chart, st);
        ins.b = compile(ex, chart, st);
      }
      break;
    }
    case NodeKind::Negate:
      ins.op = Op::Neg;
      ins.a = compile(e.operand(), chart, st);
      break;
    case NodeKind::Call:
      switch (e.func()) {
        case Builtin::Exp: ins.op = Op::Exp; break;
        case Builtin::Ln: ins.op = Op::Ln; break;
        case Builtin::Sin: ins.op = Op::Sin; break;
        case Builtin::Cos: ins.op = Op::Cos; break;
      }
      ins.a = compile(e.operand(), chart, st);
      break;
  }
  std::uint32_t slot = static_cast<std::uint32_t>(code_.size());
  code_.push_back(ins);
  origin_.push_back(e.node());
  st.slots.emplace(e.node(), slot);
  return slot;
}

void Tape::fail_at(std::size_t slot, const char* msg) const {
  // Non-owning wrapper; the node stays alive through roots_.
  Expression e(NodePtr(NodePtr{}, origin_[slot]));
  throw DomainError(msg, e.str_truncated());
}

void Tape::eval(std::span<const double> coords, std::vector<double>& scratch,
                std::span<double> out) const {
  scratch.resize(code_.size());
  double* r = scratch.data();
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& ins = code_[i];
    auto fail = [&](const char* m) { fail_at(i, m); };
    double v = 0.0;
    switch (ins.op) {
      case Op::Const: v = ins.cval; break;
      case Op::Var: v = coords[ins.a]; break;
      case Op::Add: v = r[ins.a] + r[ins.b]; break;
      case Op::Mul: v = r[ins.a] * r[ins.b]; break;
      case Op::Div: v = detail::eval_div(r[ins.a], r[ins.b], fail); break;
      case Op::Neg: v = -r[ins.a]; break;
      case Op::PowInt: v = detail::eval_pow_int(r[ins.a], ins.ipow, fail); break;
      case Op::Pow: v = detail::eval_pow(r[ins.a], r[ins.b], fail); break;
      case Op::Exp: v = std::exp(r[ins.a]); break;
      case Op::Ln: v = detail::eval_ln(r[ins.a], fail); break;
      case Op::Sin: v = std::sin(r[ins.a]); break;
      case Op::Cos: v = std::cos(r[ins.a]); break;
    }
    if (!std::isfinite(v)) fail_at(i, "non-finite value");
    r[i] = v;
  }
  for (std::size_t k = 0; k < root_slots_.size(); ++k) {
    out[k] = r[root_slots_[k]];
  }
}

std::vector<double> Tape::eval_at(const Point& p) const {
  std::vector<double> scratch;
  std::vector<double> out(root_count());
  eval(p.values(), scratch, out);
  return out;
}

}  // namespace jacobi
