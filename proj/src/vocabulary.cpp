#include <beliefrl/vocabulary.hpp>

#include <beliefrl/errors.hpp>

namespace beliefrl {

Vocabulary::Vocabulary( std::vector<std::string> names )
  : names_( std::move( names ) )
{
  if ( names_.size() > max_size )
  {
    throw CapacityError( "vocabulary has " + std::to_string( names_.size() ) + " propositions; at most " +
                         std::to_string( max_size ) + " are supported" );
  }
  for ( std::size_t i = 0; i < names_.size(); ++i )
  {
    if ( !index_.emplace( names_[i], i ).second )
    {
      throw ValidationError( "duplicate proposition '" + names_[i] + "' in vocabulary" );
    }
  }
}

std::optional<std::size_t> Vocabulary::index_of( std::string_view name ) const
{
  if ( auto it = index_.find( name ); it != index_.end() )
  {
    return it->second;
  }
  return std::nullopt;
}

VocabularyPtr make_vocabulary( std::vector<std::string> names )
{
  return std::make_shared<const Vocabulary>( std::move( names ) );
}

TruthAssignment::TruthAssignment( VocabularyPtr vocabulary, AssignmentBits bits )
  : vocabulary_( std::move( vocabulary ) ), bits_( bits )
{
  if ( !vocabulary_ )
  {
    throw ValidationError( "truth assignment without a vocabulary" );
  }
  if ( vocabulary_->size() < 64 && ( bits_ >> vocabulary_->size() ) != 0 )
  {
    throw ValidationError( "assignment bits exceed the vocabulary size" );
  }
}

TruthAssignment TruthAssignment::from_values( VocabularyPtr vocabulary,
                                              std::initializer_list<std::pair<std::string_view, bool>> values )
{
  AssignmentBits bits = 0;
  for ( const auto& [name, value] : values )
  {
    const auto index = vocabulary->index_of( name );
    if ( !index )
    {
      throw ValidationError( "proposition '" + std::string( name ) + "' is not in the vocabulary" );
    }
    if ( value )
    {
      bits |= AssignmentBits{ 1 } << *index;
    }
  }
  return TruthAssignment( std::move( vocabulary ), bits );
}

TruthAssignment TruthAssignment::from_true_set( VocabularyPtr vocabulary, const std::vector<std::string>& true_props )
{
  AssignmentBits bits = 0;
  for ( const auto& name : true_props )
  {
    const auto index = vocabulary->index_of( name );
    if ( !index )
    {
      throw ValidationError( "proposition '" + name + "' is not in the vocabulary" );
    }
    bits |= AssignmentBits{ 1 } << *index;
  }
  return TruthAssignment( std::move( vocabulary ), bits );
}

bool TruthAssignment::value( std::string_view name ) const
{
  const auto index = vocabulary_->index_of( name );
  if ( !index )
  {
    throw ValidationError( "proposition '" + std::string( name ) + "' is not in the vocabulary" );
  }
  return value( *index );
}

std::string TruthAssignment::to_string() const
{
  std::string out = "{";
  for ( std::size_t i = 0; i < vocabulary_->size(); ++i )
  {
    if ( i > 0 )
    {
      out += ", ";
    }
    out += vocabulary_->name( i );
    out += value( i ) ? "=1" : "=0";
  }
  out += "}";
  return out;
}

} // namespace beliefrl
