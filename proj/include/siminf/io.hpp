#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "siminf/error.hpp"
#include "siminf/metrics.hpp"
#include "siminf/parser.hpp"
#include "siminf/structure.hpp"
#include "siminf/updates.hpp"

namespace siminf {

// Text formats.
//
// Database file:
//   signature: C/1 E/1 H/2 s/0 l/0 a/0
//   domain: e_s e_l e_a
//   const s = e_s
//   rel C = { e_s, e_l }
//   rel H = { (e_s,e_a), (e_l,e_a) }
//   theory:
//     forall x. (C(x) -> exists y. H(x,y))
// Update script, one op per line:
//   insert b = e_a
//   insert E (e_b*)          — '*' marks a fresh element
//   delete H (e_s, e_a)
//   delete C (e_s) drop e_s
//   delete s -> e_a
// Deduction list, one per line:
//   E(a); C(s) |- exists x. E(x)
// '#' starts a comment in all three.

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

[[noreturn]] inline void line_error(int line, const std::string& what,
                                    ErrorKind kind = ErrorKind::syntax) {
  throw Error(kind, "line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Database files
// ---------------------------------------------------------------------------

/// Parses the database text format. With enforce_correctness (the default)
/// a structure that fails its own theory is rejected loudly, naming the
/// failing sentences.
inline Database parse_database_text(const std::string& text,
                                    bool enforce_correctness = true) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  Signature sig;
  bool have_sig = false;
  std::vector<Element> domain;
  bool have_domain = false;
  std::map<std::string, Element> constants;
  std::map<std::string, std::set<std::vector<Element>>> relations;
  std::vector<FormulaPtr> theory;
  bool in_theory = false;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;

    if (in_theory) {
      try {
        theory.push_back(parse_sentence(line, sig));
      } catch (const Error& e) {
        detail::line_error(line_no, e.what(), e.kind());
      }
      continue;
    }

    if (line.rfind("signature:", 0) == 0) {
      if (have_sig) detail::line_error(line_no, "duplicate signature line");
      for (const auto& tok : detail::split_ws(line.substr(10))) {
        auto slash = tok.rfind('/');
        if (slash == std::string::npos)
          detail::line_error(line_no, "expected NAME/ARITY, got '" + tok + "'");
        std::string name = tok.substr(0, slash);
        int arity = 0;
        try {
          arity = std::stoi(tok.substr(slash + 1));
        } catch (...) {
          detail::line_error(line_no, "bad arity in '" + tok + "'");
        }
        try {
          sig.add({name, arity});
        } catch (const Error& e) {
          detail::line_error(line_no, e.what(), e.kind());
        }
      }
      have_sig = true;
      continue;
    }
    if (!have_sig) detail::line_error(line_no, "expected 'signature:' first");

    if (line.rfind("domain:", 0) == 0) {
      if (have_domain) detail::line_error(line_no, "duplicate domain line");
      domain = detail::split_ws(line.substr(7));
      if (domain.empty()) detail::line_error(line_no, "domain must be nonempty");
      have_domain = true;
      continue;
    }
    if (!have_domain) detail::line_error(line_no, "expected 'domain:' before interpretations");

    if (line.rfind("const ", 0) == 0) {
      auto parts = detail::split_on(line.substr(6), '=');
      if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
        detail::line_error(line_no, "expected 'const NAME = ELEMENT'");
      const Symbol* sym = sig.find(parts[0]);
      if (!sym) detail::line_error(line_no, "undeclared constant '" + parts[0] + "'",
                                   ErrorKind::unknown_symbol);
      if (!sym->is_constant())
        detail::line_error(line_no, "'" + parts[0] + "' is not a constant",
                           ErrorKind::arity_mismatch);
      constants[parts[0]] = parts[1];
      continue;
    }

    if (line.rfind("rel ", 0) == 0) {
      auto eq = line.find('=');
      if (eq == std::string::npos) detail::line_error(line_no, "expected '='");
      std::string name = detail::trim(line.substr(4, eq - 4));
      const Symbol* sym = sig.find(name);
      if (!sym) detail::line_error(line_no, "undeclared relation '" + name + "'",
                                   ErrorKind::unknown_symbol);
      if (!sym->is_relation())
        detail::line_error(line_no, "'" + name + "' is not a relation",
                           ErrorKind::arity_mismatch);
      std::string rhs = detail::trim(line.substr(eq + 1));
      if (rhs.size() < 2 || rhs.front() != '{' || rhs.back() != '}')
        detail::line_error(line_no, "expected '{ ... }'");
      std::string body = detail::trim(rhs.substr(1, rhs.size() - 2));
      auto& tuples = relations[name];  // present even when empty
      if (!body.empty()) {
        // split on commas at paren depth 0
        std::vector<std::string> items;
        std::string cur;
        int depth = 0;
        for (char c : body) {
          if (c == '(') ++depth;
          if (c == ')') --depth;
          if (c == ',' && depth == 0) {
            items.push_back(detail::trim(cur));
            cur.clear();
          } else {
            cur += c;
          }
        }
        items.push_back(detail::trim(cur));
        for (auto& item : items) {
          std::vector<Element> tuple;
          if (!item.empty() && item.front() == '(') {
            if (item.back() != ')') detail::line_error(line_no, "unbalanced tuple");
            for (auto& e : detail::split_on(item.substr(1, item.size() - 2), ','))
              tuple.push_back(e);
          } else {
            tuple.push_back(item);  // unary tuples may omit parens
          }
          if (static_cast<int>(tuple.size()) != sym->arity)
            detail::line_error(line_no,
                               "tuple arity " + std::to_string(tuple.size()) +
                                   " does not match " + name + "/" +
                                   std::to_string(sym->arity),
                               ErrorKind::arity_mismatch);
          tuples.insert(std::move(tuple));
        }
      }
      continue;
    }

    if (line == "theory:") {
      in_theory = true;
      continue;
    }
    detail::line_error(line_no, "unrecognized line '" + line + "'");
  }

  if (!have_sig) throw Error(ErrorKind::malformed_input, "missing 'signature:' line");
  if (!have_domain) throw Error(ErrorKind::malformed_input, "missing 'domain:' line");
  for (const auto& sym : sig.symbols())  // interpret every relation, even empty
    if (sym.is_relation() && !relations.count(sym.name)) relations[sym.name];

  Database db = make_database(
      FiniteStructure(sig, domain, std::move(constants), std::move(relations)),
      std::move(theory));
  if (enforce_correctness) {
    CorrectnessReport report = check_correctness(db);
    if (!report.ok) {
      std::string list;
      for (const auto& f : report.failing) {
        if (!list.empty()) list += "; ";
        list += to_string(f);
      }
      throw Error(ErrorKind::theory_violation,
                  "database is not correct, failing sentence(s): " + list);
    }
  }
  return db;
}

inline std::string save_structure_text(const FiniteStructure& s) {
  std::ostringstream out;
  out << "signature:";
  for (const auto& sym : s.signature().symbols())
    out << " " << sym.name << "/" << sym.arity;
  out << "\ndomain:";
  for (const auto& e : s.domain()) out << " " << e;
  out << "\n";
  for (const auto& sym : s.signature().symbols()) {
    if (!sym.is_constant()) continue;
    out << "const " << sym.name << " = " << s.constant(sym.name) << "\n";
  }
  for (const auto& sym : s.signature().symbols()) {
    if (!sym.is_relation()) continue;
    out << "rel " << sym.name << " = {";
    bool first = true;
    for (const auto& tuple : s.relation(sym.name)) {
      out << (first ? " " : ", ");
      first = false;
      if (tuple.size() == 1) {
        out << tuple[0];
      } else {
        out << "(";
        for (std::size_t i = 0; i < tuple.size(); ++i)
          out << (i ? "," : "") << tuple[i];
        out << ")";
      }
    }
    out << (first ? "}" : " }") << "\n";
  }
  return out.str();
}

inline std::string save_database_text(const Database& db) {
  std::string out = save_structure_text(db.structure);
  out += "theory:\n";
  for (const auto& f : db.theory) out += "  " + to_string(f) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Update scripts
// ---------------------------------------------------------------------------

namespace detail {

inline ElementRef parse_element_ref(std::string tok, int line) {
  ElementRef ref;
  if (!tok.empty() && tok.back() == '*') {
    ref.fresh = true;
    tok.pop_back();
  }
  ref.id = trim(tok);
  if (ref.id.empty()) line_error(line, "empty element id");
  return ref;
}

inline std::vector<std::string> parse_tuple_text(const std::string& text, int line) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')')
    line_error(line, "expected '(...)' payload");
  std::vector<std::string> out;
  for (auto& item : split_on(t.substr(1, t.size() - 2), ',')) {
    if (item.empty()) line_error(line, "empty element in tuple");
    out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline std::vector<UpdateOp> parse_update_script(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<UpdateOp> ops;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;

    if (line.rfind("insert ", 0) == 0) {
      std::string rest = detail::trim(line.substr(7));
      auto eq = rest.find('=');
      auto paren = rest.find('(');
      if (eq != std::string::npos && (paren == std::string::npos || eq < paren)) {
        std::string name = detail::trim(rest.substr(0, eq));
        ElementRef ref =
            detail::parse_element_ref(detail::trim(rest.substr(eq + 1)), line_no);
        if (!is_identifier(name)) detail::line_error(line_no, "bad constant name");
        ops.push_back(InsertionSpec{{name, 0}, {ref}});
      } else if (paren != std::string::npos) {
        std::string name = detail::trim(rest.substr(0, paren));
        if (!is_identifier(name)) detail::line_error(line_no, "bad relation name");
        std::vector<ElementRef> payload;
        for (auto& tok : detail::parse_tuple_text(rest.substr(paren), line_no))
          payload.push_back(detail::parse_element_ref(tok, line_no));
        ops.push_back(
            InsertionSpec{{name, static_cast<int>(payload.size())}, payload});
      } else {
        detail::line_error(line_no, "expected 'insert NAME = ELEM' or 'insert NAME (...)'");
      }
      continue;
    }

    if (line.rfind("delete ", 0) == 0) {
      std::string rest = detail::trim(line.substr(7));
      std::vector<Element> drop;
      auto drop_pos = rest.find(" drop ");
      if (drop_pos != std::string::npos) {
        for (auto& d : detail::split_on(rest.substr(drop_pos + 6), ',')) {
          if (d.empty()) detail::line_error(line_no, "empty drop element");
          drop.push_back(d);
        }
        rest = detail::trim(rest.substr(0, drop_pos));
      }
      auto arrow = rest.find("->");
      auto paren = rest.find('(');
      if (arrow != std::string::npos && (paren == std::string::npos || arrow < paren)) {
        std::string name = detail::trim(rest.substr(0, arrow));
        std::string target = detail::trim(rest.substr(arrow + 2));
        if (!is_identifier(name)) detail::line_error(line_no, "bad constant name");
        if (target.empty()) detail::line_error(line_no, "missing new referent");
        ops.push_back(DeletionSpec{{name, 0}, {target}, drop});
      } else if (paren != std::string::npos) {
        std::string name = detail::trim(rest.substr(0, paren));
        if (!is_identifier(name)) detail::line_error(line_no, "bad relation name");
        auto tuple = detail::parse_tuple_text(rest.substr(paren), line_no);
        ops.push_back(
            DeletionSpec{{name, static_cast<int>(tuple.size())}, tuple, drop});
      } else {
        detail::line_error(line_no, "expected 'delete NAME -> ELEM' or 'delete NAME (...)'");
      }
      continue;
    }

    detail::line_error(line_no, "unrecognized op '" + line + "'");
  }
  return ops;
}

inline std::string save_update_script(const std::vector<UpdateOp>& ops) {
  std::string out;
  for (const auto& op : ops) out += op_to_string(op) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Deduction lists
// ---------------------------------------------------------------------------

inline std::vector<Deduction> parse_deductions(const std::string& text,
                                               const Signature& sig) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::vector<Deduction> out;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(detail::strip_comment(raw));
    if (line.empty()) continue;
    auto turnstile = line.find("|-");
    if (turnstile == std::string::npos)
      detail::line_error(line_no, "expected 'PREMISES |- CONCLUSION'");
    std::string left = detail::trim(line.substr(0, turnstile));
    std::string right = detail::trim(line.substr(turnstile + 2));
    try {
      std::vector<FormulaPtr> premises;
      if (!left.empty())
        for (auto& p : detail::split_on(left, ';'))
          premises.push_back(parse_sentence(p, sig));
      out.push_back(Deduction::make(std::move(premises), parse_sentence(right, sig)));
    } catch (const Error& e) {
      detail::line_error(line_no, e.what(), e.kind());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files and digests
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::io, "write to '" + path + "' failed");
}

inline Database load_database(const std::string& path, bool enforce_correctness = true) {
  try {
    return parse_database_text(read_file(path), enforce_correctness);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

inline std::vector<UpdateOp> load_update_script(const std::string& path) {
  try {
    return parse_update_script(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

/// FNV-1a 64-bit content digest, reported alongside inputs for reproducibility.
inline std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // offset basis
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;  // prime
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace siminf
