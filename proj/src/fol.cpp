#include "folk/fol.hpp"

#include "folk/errors.hpp"
#include "folk/text.hpp"

namespace folk {

std::string to_string(Truth t) {
  switch (t) {
    case Truth::True: return "True";
    case Truth::False: return "False";
    case Truth::Unknown: return "Unknown";
  }
  return "Unknown";
}

Truth truth_from_string(std::string_view s) {
  if (s == "True") return Truth::True;
  if (s == "False") return Truth::False;
  return Truth::Unknown;
}

std::string Predicate::head() const {
  return name + "(" + join(args, ", ") + ")";
}

std::string Predicate::identity() const {
  std::vector<std::string> norm;
  norm.reserve(args.size());
  for (const std::string& a : args) norm.push_back(normalize_ws(a));
  return normalize_ws(name) + "(" + join(norm, ", ") + ")";
}

std::string render_predicate(const Predicate& p) {
  if (p.description.empty()) return p.head();
  return p.head() + " ::: " + p.description;
}

bool PredicateClause::contains(std::string_view identity) const {
  for (const Predicate& p : predicates) {
    if (p.identity() == identity) return true;
  }
  return false;
}

void TruthAssignment::set(const Predicate& p, Truth value, std::string reason) {
  entries_[p.identity()] = Entry{value, std::move(reason)};
}

void TruthAssignment::set_identity(const std::string& identity, Truth value, std::string reason) {
  entries_[identity] = Entry{value, std::move(reason)};
}

const TruthAssignment::Entry* TruthAssignment::find(const Predicate& p) const {
  return find_identity(p.identity());
}

const TruthAssignment::Entry* TruthAssignment::find_identity(const std::string& identity) const {
  auto it = entries_.find(identity);
  return it == entries_.end() ? nullptr : &it->second;
}

Predicate parse_predicate(std::string_view line, std::vector<std::string>* warnings) {
  std::size_t desc_pos = line.find(":::");
  std::string_view head_part = desc_pos == std::string_view::npos ? line : line.substr(0, desc_pos);
  std::string description =
      desc_pos == std::string_view::npos ? std::string() : trim(line.substr(desc_pos + 3));

  std::size_t open = head_part.find('(');
  if (open == std::string_view::npos) throw MalformedPredicate("no '(' in predicate line");

  std::string name = trim(head_part.substr(0, open));
  if (name.empty()) throw MalformedPredicate("empty predicate name");
  if (name.find(')') != std::string::npos || name.find("&&") != std::string::npos)
    throw MalformedPredicate("invalid predicate name: " + name);

  int depth = 1;
  std::size_t close = std::string_view::npos;
  for (std::size_t i = open + 1; i < head_part.size(); ++i) {
    if (head_part[i] == '(') ++depth;
    else if (head_part[i] == ')') {
      if (--depth == 0) {
        close = i;
        break;
      }
    }
  }
  if (close == std::string_view::npos) throw MalformedPredicate("unbalanced parentheses");

  std::string_view inner = head_part.substr(open + 1, close - open - 1);
  std::vector<std::string> args;
  std::size_t start = 0;
  depth = 0;
  for (std::size_t i = 0; i <= inner.size(); ++i) {
    bool at_end = i == inner.size();
    char c = at_end ? ',' : inner[i];
    if (!at_end && c == '(') ++depth;
    if (!at_end && c == ')') --depth;
    if (c == ',' && depth == 0) {
      std::string arg = trim(inner.substr(start, i - start));
      if (arg.empty()) {
        if (warnings && !(at_end && args.empty() && start == 0))
          warnings->push_back("empty argument dropped in: " + std::string(line));
      } else {
        args.push_back(std::move(arg));
      }
      start = i + 1;
    }
  }
  if (args.empty()) throw MalformedPredicate("empty argument list");

  return Predicate{std::move(name), std::move(args), std::move(description)};
}

namespace {

// Splits a line on "&&" occurring at parenthesis depth 0.
std::vector<std::string> split_conjuncts(std::string_view line) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == '&' && depth == 0 && i + 1 < line.size() && line[i + 1] == '&') {
      out.emplace_back(line.substr(start, i - start));
      start = i + 2;
      ++i;
    }
  }
  out.emplace_back(line.substr(start));
  return out;
}

}  // namespace

ClauseParse parse_clause(std::string_view block) {
  ClauseParse out;
  int line_no = 0;
  for (const std::string& raw : split_lines(block)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    for (const std::string& segment : split_conjuncts(raw)) {
      std::string text = trim(segment);
      if (text.empty()) continue;
      std::vector<std::string> warnings;
      try {
        Predicate p = parse_predicate(text, &warnings);
        for (std::string& w : warnings)
          out.diagnostics.push_back({line_no, text, std::move(w)});
        if (out.clause.contains(p.identity())) {
          out.diagnostics.push_back({line_no, text, "duplicate predicate dropped: " + p.identity()});
        } else {
          out.clause.predicates.push_back(std::move(p));
        }
      } catch (const MalformedPredicate& e) {
        out.diagnostics.push_back({line_no, text, e.what()});
      }
    }
  }
  return out;
}

std::string render_clause(const PredicateClause& clause) {
  if (clause.empty()) throw EmptyClause("cannot render an empty clause");
  std::vector<std::string> heads;
  heads.reserve(clause.size());
  for (const Predicate& p : clause.predicates) heads.push_back(p.head());
  return join(heads, " && ");
}

Truth evaluate_clause(const PredicateClause& clause, const TruthAssignment& assignment) {
  bool any_unknown = false;
  for (const Predicate& p : clause.predicates) {
    const TruthAssignment::Entry* e = assignment.find(p);
    if (!e) throw MissingAssignment("no truth value for predicate: " + p.identity());
    if (e->value == Truth::False) return Truth::False;
    if (e->value == Truth::Unknown) any_unknown = true;
  }
  return any_unknown ? Truth::Unknown : Truth::True;
}

}  // namespace folk
