#ifndef FOLK_FOL_HPP
#define FOLK_FOL_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace folk {

// Three-valued truth: False dominates, Unknown marks evidence gaps.
enum class Truth { True, False, Unknown };

std::string to_string(Truth t);
Truth truth_from_string(std::string_view s);

// A ground predicate: Name(arg1, arg2, ...) with an optional free-text
// verification instruction after ":::".
struct Predicate {
  std::string name;
  std::vector<std::string> args;
  std::string description;

  // "Name(arg1, arg2)" using the stored spellings.
  std::string head() const;
  // Whitespace-normalized head; predicate identity (case-sensitive,
  // description excluded).
  std::string identity() const;

  bool operator==(const Predicate& other) const {
    return name == other.name && args == other.args && description == other.description;
  }
};

// Head plus " ::: description" when a description is present.
std::string render_predicate(const Predicate& p);

struct ParseDiagnostic {
  int line = 0;  // 1-based line within the parsed block, 0 if N/A
  std::string text;
  std::string reason;
};

// Ordered conjunction of predicates, unique by identity.
struct PredicateClause {
  std::vector<Predicate> predicates;

  bool empty() const { return predicates.empty(); }
  std::size_t size() const { return predicates.size(); }
  bool contains(std::string_view identity) const;
};

struct ClauseParse {
  PredicateClause clause;
  std::vector<ParseDiagnostic> diagnostics;
};

// Truth values per predicate identity. Every predicate under evaluation must
// have an entry; Unknown is the explicit default, never absence.
class TruthAssignment {
 public:
  struct Entry {
    Truth value = Truth::Unknown;
    std::string reason;
  };

  void set(const Predicate& p, Truth value, std::string reason = "");
  void set_identity(const std::string& identity, Truth value, std::string reason = "");
  const Entry* find(const Predicate& p) const;
  const Entry* find_identity(const std::string& identity) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  std::map<std::string, Entry> entries_;
};

// Parses one predicate line. Arguments are split on commas at parenthesis
// depth 1; text between the closing parenthesis and ":::" (stray punctuation
// some models emit) is ignored. Throws MalformedPredicate when there is no
// balanced argument list, the name is empty, or no argument survives.
// Empty argument segments are dropped and reported through `warnings`.
Predicate parse_predicate(std::string_view line, std::vector<std::string>* warnings = nullptr);

// Total: never throws on arbitrary text. Unparseable non-blank lines become
// diagnostics; duplicates (by identity) are dropped with a diagnostic.
// Segments joined by "&&" at parenthesis depth 0 are parsed individually so
// a rendered clause round-trips.
ClauseParse parse_clause(std::string_view block);

// Heads joined by " && ". Throws EmptyClause on an empty clause.
std::string render_clause(const PredicateClause& clause);

// Three-valued conjunction over the clause: False if any entry is False,
// else Unknown if any entry is Unknown, else True. Throws MissingAssignment
// when a predicate has no entry.
Truth evaluate_clause(const PredicateClause& clause, const TruthAssignment& assignment);

}  // namespace folk

#endif  // FOLK_FOL_HPP
