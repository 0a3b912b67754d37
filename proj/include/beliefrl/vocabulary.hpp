#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace beliefrl {

/// Integer encoding of one time-step's truth values: bit i is the value of
/// vocabulary entry i.
using AssignmentBits = std::uint64_t;

/// Ordered, duplicate-free list of proposition names.
class Vocabulary
{
public:
  static constexpr std::size_t max_size = 64;

  Vocabulary() = default;
  explicit Vocabulary( std::vector<std::string> names );

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  const std::string& name( std::size_t i ) const { return names_.at( i ); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<std::size_t> index_of( std::string_view name ) const;
  bool contains( std::string_view name ) const { return index_of( name ).has_value(); }

  /// Number of distinct assignments, 2^size(). Only meaningful for small
  /// vocabularies; callers cap the size before enumerating.
  std::uint64_t assignment_count() const { return std::uint64_t{ 1 } << names_.size(); }

  bool operator==( const Vocabulary& other ) const { return names_ == other.names_; }

private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

VocabularyPtr make_vocabulary( std::vector<std::string> names );

/// One time-step's valuation over a fixed vocabulary.
class TruthAssignment
{
public:
  TruthAssignment( VocabularyPtr vocabulary, AssignmentBits bits );

  /// Builds an assignment from (name, value) pairs; unnamed propositions are
  /// false. Throws ValidationError on a name outside the vocabulary.
  static TruthAssignment from_values( VocabularyPtr vocabulary,
                                      std::initializer_list<std::pair<std::string_view, bool>> values );
  static TruthAssignment from_true_set( VocabularyPtr vocabulary, const std::vector<std::string>& true_props );

  const Vocabulary& vocabulary() const { return *vocabulary_; }
  const VocabularyPtr& vocabulary_ptr() const { return vocabulary_; }
  AssignmentBits bits() const noexcept { return bits_; }

  bool value( std::size_t index ) const { return ( bits_ >> index ) & 1u; }
  bool value( std::string_view name ) const;

  /// Renders as "{T0=0, W1=1}".
  std::string to_string() const;

  bool operator==( const TruthAssignment& other ) const
  {
    return bits_ == other.bits_ && *vocabulary_ == *other.vocabulary_;
  }

private:
  VocabularyPtr vocabulary_;
  AssignmentBits bits_;
};

} // namespace beliefrl
