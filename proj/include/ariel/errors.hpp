#pragma once

#include <stdexcept>
#include <string>

namespace ariel {

// Every failure carries a stable machine-parseable code (the class name);
// the CLI prints them as "error: <code>: <message>".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define ARIEL_ERROR_TYPE(Name)                                    \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& message)                 \
            : Error(#Name, message) {}                            \
    }

ARIEL_ERROR_TYPE(SyntaxError);
ARIEL_ERROR_TYPE(UndefinedSymbol);
ARIEL_ERROR_TYPE(CyclicGrammar);
ARIEL_ERROR_TYPE(InvalidContinuation);
ARIEL_ERROR_TYPE(NotInLanguage);
ARIEL_ERROR_TYPE(ExplosionGuard);
ARIEL_ERROR_TYPE(PrecisionOverflow);
ARIEL_ERROR_TYPE(DimensionMismatch);
ARIEL_ERROR_TYPE(ConfigMismatch);
ARIEL_ERROR_TYPE(LanguageTooSmall);
ARIEL_ERROR_TYPE(CatalogMismatch);
ARIEL_ERROR_TYPE(ExhaustedBias);
ARIEL_ERROR_TYPE(InsufficientSentences);
ARIEL_ERROR_TYPE(AdapterFailure);
ARIEL_ERROR_TYPE(ProtocolError);
ARIEL_ERROR_TYPE(Timeout);
ARIEL_ERROR_TYPE(ChildExit);
ARIEL_ERROR_TYPE(EmptyTestSet);

#undef ARIEL_ERROR_TYPE

}  // namespace ariel
