#pragma once

#include <stdexcept>
#include <string>

namespace rumor {

// Broad failure class. The CLI maps these onto exit codes.
enum class ErrorKind {
    Usage,  // bad arguments or configuration
    Data,   // corpus / label / structure problems
    Model,  // missing or untrained backend state
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define RUMOR_DEFINE_ERROR(Name, Kind)                                        \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    };

RUMOR_DEFINE_ERROR(UsageError, Usage)
RUMOR_DEFINE_ERROR(MalformedStructure, Data)
RUMOR_DEFINE_ERROR(UnparseableTimestamp, Data)
RUMOR_DEFINE_ERROR(CorpusFormatError, Data)
RUMOR_DEFINE_ERROR(InsufficientClassExamples, Data)
RUMOR_DEFINE_ERROR(EmptyEvidence, Data)
RUMOR_DEFINE_ERROR(DegenerateEvidence, Data)
RUMOR_DEFINE_ERROR(IdMismatch, Data)
RUMOR_DEFINE_ERROR(EmptyMatrix, Data)
RUMOR_DEFINE_ERROR(UntrainedBackend, Model)
RUMOR_DEFINE_ERROR(ModelFormatError, Model)

#undef RUMOR_DEFINE_ERROR

}  // namespace rumor
