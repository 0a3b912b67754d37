#include <beliefrl/parser.hpp>

#include <beliefrl/rewrite.hpp>

#include <cctype>
#include <optional>

namespace beliefrl::ltl {

namespace {

enum class Tok
{
  End,
  Ident,
  True,
  False,
  Not,
  And,
  Or,
  Implies,
  LParen,
  RParen,
  Next,
  Eventually,
  Globally,
  Until,
  Release
};

struct Token
{
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::string describe( const Token& token )
{
  return token.kind == Tok::End ? "end of input" : "'" + token.text + "'";
}

class Lexer
{
public:
  explicit Lexer( std::string_view text ) : text_( text ) {}

  Token next()
  {
    skip_space();
    Token token{ Tok::End, {}, line_, column_ };
    if ( pos_ >= text_.size() )
    {
      return token;
    }
    const char c = text_[pos_];
    const auto single = [&]( Tok kind ) {
      token.kind = kind;
      token.text = std::string( 1, c );
      advance( 1 );
      return token;
    };
    switch ( c )
    {
    case '!':
      return single( Tok::Not );
    case '&':
      return single( Tok::And );
    case '|':
      return single( Tok::Or );
    case '(':
      return single( Tok::LParen );
    case ')':
      return single( Tok::RParen );
    case '-':
      if ( pos_ + 1 < text_.size() && text_[pos_ + 1] == '>' )
      {
        token.kind = Tok::Implies;
        token.text = "->";
        advance( 2 );
        return token;
      }
      break;
    default:
      break;
    }
    if ( std::isalpha( static_cast<unsigned char>( c ) ) || c == '_' )
    {
      std::size_t end = pos_;
      while ( end < text_.size() &&
              ( std::isalnum( static_cast<unsigned char>( text_[end] ) ) || text_[end] == '_' ) )
      {
        ++end;
      }
      token.text = std::string( text_.substr( pos_, end - pos_ ) );
      advance( end - pos_ );
      token.kind = keyword( token.text ).value_or( Tok::Ident );
      return token;
    }

    std::string op( 1, c );
    if ( pos_ + 1 < text_.size() && std::ispunct( static_cast<unsigned char>( text_[pos_ + 1] ) ) &&
         text_[pos_ + 1] != '(' && text_[pos_ + 1] != ')' )
    {
      op += text_[pos_ + 1];
    }
    throw ParseError( "unknown operator '" + op + "'", line_, column_, {} );
  }

private:
  static std::optional<Tok> keyword( const std::string& word )
  {
    if ( word == "true" )
      return Tok::True;
    if ( word == "false" )
      return Tok::False;
    if ( word == "X" )
      return Tok::Next;
    if ( word == "F" )
      return Tok::Eventually;
    if ( word == "G" )
      return Tok::Globally;
    if ( word == "U" )
      return Tok::Until;
    if ( word == "R" )
      return Tok::Release;
    return std::nullopt;
  }

  void skip_space()
  {
    while ( pos_ < text_.size() && std::isspace( static_cast<unsigned char>( text_[pos_] ) ) )
    {
      advance( 1 );
    }
  }

  void advance( std::size_t n )
  {
    for ( std::size_t i = 0; i < n; ++i, ++pos_ )
    {
      if ( text_[pos_] == '\n' )
      {
        ++line_;
        column_ = 1;
      }
      else
      {
        ++column_;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser
{
public:
  explicit Parser( std::string_view text ) : lexer_( text ), current_( lexer_.next() ) {}

  Formula parse_all()
  {
    Formula f = formula();
    if ( current_.kind != Tok::End )
    {
      fail( { "'->'", "'|'", "'&'", "'U'", "'R'", "end of input" } );
    }
    return f;
  }

private:
  Formula formula()
  {
    Formula lhs = disj();
    if ( current_.kind == Tok::Implies )
    {
      shift();
      Formula rhs = disj();
      return disjunction( { negation( std::move( lhs ) ), std::move( rhs ) } );
    }
    return lhs;
  }

  Formula disj()
  {
    std::vector<Formula> operands{ conj() };
    while ( current_.kind == Tok::Or )
    {
      shift();
      operands.push_back( conj() );
    }
    return operands.size() == 1 ? std::move( operands.front() ) : disjunction( std::move( operands ) );
  }

  Formula conj()
  {
    std::vector<Formula> operands{ binop() };
    while ( current_.kind == Tok::And )
    {
      shift();
      operands.push_back( binop() );
    }
    return operands.size() == 1 ? std::move( operands.front() ) : conjunction( std::move( operands ) );
  }

  Formula binop()
  {
    Formula lhs = unary();
    if ( current_.kind == Tok::Until || current_.kind == Tok::Release )
    {
      const bool is_until = current_.kind == Tok::Until;
      shift();
      Formula rhs = binop();
      return is_until ? until( std::move( lhs ), std::move( rhs ) ) : release( std::move( lhs ), std::move( rhs ) );
    }
    return lhs;
  }

  Formula unary()
  {
    switch ( current_.kind )
    {
    case Tok::Not:
      shift();
      return negation( unary() );
    case Tok::Next:
      shift();
      return next( unary() );
    case Tok::Eventually:
      shift();
      return eventually( unary() );
    case Tok::Globally:
      shift();
      return globally( unary() );
    default:
      return atom();
    }
  }

  Formula atom()
  {
    switch ( current_.kind )
    {
    case Tok::True:
      shift();
      return top();
    case Tok::False:
      shift();
      return bottom();
    case Tok::Ident:
    {
      std::string name = current_.text;
      shift();
      return prop( std::move( name ) );
    }
    case Tok::LParen:
    {
      shift();
      Formula inner = formula();
      if ( current_.kind != Tok::RParen )
      {
        fail( { "')'" } );
      }
      shift();
      return inner;
    }
    default:
      fail( { "'!'", "'X'", "'F'", "'G'", "'('", "'true'", "'false'", "identifier" } );
    }
  }

  void shift() { current_ = lexer_.next(); }

  [[noreturn]] void fail( std::vector<std::string> expected ) const
  {
    std::string message = "unexpected " + describe( current_ ) + ", expected one of:";
    for ( const auto& e : expected )
    {
      message += " " + e;
    }
    throw ParseError( message, current_.line, current_.column, std::move( expected ) );
  }

  Lexer lexer_;
  Token current_;
};

} // namespace

ParseError::ParseError( const std::string& message, std::size_t line, std::size_t column,
                        std::vector<std::string> expected )
  : ValidationError( std::to_string( line ) + ":" + std::to_string( column ) + ": " + message ),
    line_( line ),
    column_( column ),
    expected_( std::move( expected ) )
{
}

Formula parse_raw( std::string_view text )
{
  return Parser( text ).parse_all();
}

Formula parse( std::string_view text )
{
  return simplify( parse_raw( text ) );
}

} // namespace beliefrl::ltl
