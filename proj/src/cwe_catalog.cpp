#include "scg/cwe_catalog.hpp"

#include <array>

namespace scg {

namespace {

// Names and summaries follow the MITRE CWE list.
constexpr std::array kCatalog = {
    CweInfo{20, "Improper Input Validation",
            "The product receives input or data, but it does not validate or "
            "incorrectly validates that the input has the properties that are "
            "required to process the data safely and correctly."},
    CweInfo{22, "Improper Limitation of a Pathname to a Restricted Directory "
                "('Path Traversal')",
            "The product uses external input to construct a pathname that is "
            "intended to identify a file or directory located underneath a "
            "restricted parent directory, but it does not properly neutralize "
            "special elements within the pathname."},
    CweInfo{77, "Improper Neutralization of Special Elements used in a "
                "Command ('Command Injection')",
            "The product constructs all or part of a command using "
            "externally-influenced input, but it does not neutralize special "
            "elements that could modify the intended command."},
    CweInfo{78, "Improper Neutralization of Special Elements used in an OS "
                "Command ('OS Command Injection')",
            "The product constructs all or part of an OS command using "
            "externally-influenced input from an upstream component, but it "
            "does not neutralize special elements that could modify the "
            "intended OS command."},
    CweInfo{79, "Improper Neutralization of Input During Web Page Generation "
                "('Cross-site Scripting')",
            "The product does not neutralize or incorrectly neutralizes "
            "user-controllable input before it is placed in output that is "
            "used as a web page that is served to other users."},
    CweInfo{88, "Improper Neutralization of Argument Delimiters in a Command "
                "('Argument Injection')",
            "The product constructs a string for a command to be executed by "
            "a separate component, and it does not properly delimit the "
            "intended arguments, options, or switches."},
    CweInfo{89, "Improper Neutralization of Special Elements used in an SQL "
                "Command ('SQL Injection')",
            "The product constructs all or part of an SQL command using "
            "externally-influenced input, but it does not neutralize special "
            "elements that could modify the intended SQL command."},
    CweInfo{120, "Buffer Copy without Checking Size of Input ('Classic "
                 "Buffer Overflow')",
            "The product copies an input buffer to an output buffer without "
            "verifying that the size of the input buffer is less than the "
            "size of the output buffer."},
    CweInfo{121, "Stack-based Buffer Overflow",
            "The product writes to a buffer allocated on the stack outside "
            "of the intended boundary of the buffer."},
    CweInfo{125, "Out-of-bounds Read",
            "The product reads data past the end, or before the beginning, "
            "of the intended buffer."},
    CweInfo{131, "Incorrect Calculation of Buffer Size",
            "The product does not correctly calculate the size to be used "
            "when allocating a buffer, which could lead to a buffer "
            "overflow."},
    CweInfo{134, "Use of Externally-Controlled Format String",
            "The product uses a function that accepts a format string as an "
            "argument, but the format string originates from an external "
            "source."},
    CweInfo{170, "Improper Null Termination",
            "The product does not terminate or incorrectly terminates a "
            "string or array with a null character or equivalent "
            "terminator."},
    CweInfo{190, "Integer Overflow or Wraparound",
            "The product performs a calculation that can produce an integer "
            "overflow or wraparound when the logic assumes the resulting "
            "value will always be larger than the original value."},
    CweInfo{193, "Off-by-one Error",
            "A product calculates or uses an incorrect maximum or minimum "
            "value that is 1 more, or 1 less, than the correct value."},
    CweInfo{252, "Unchecked Return Value",
            "The product does not check the return value from a method or "
            "function, which can prevent it from detecting unexpected states "
            "and conditions."},
    CweInfo{276, "Incorrect Default Permissions",
            "During installation, installed file permissions are set to "
            "allow anyone to modify those files."},
    CweInfo{295, "Improper Certificate Validation",
            "The product does not validate, or incorrectly validates, a "
            "certificate, which might allow an attacker to spoof a trusted "
            "entity."},
    CweInfo{311, "Missing Encryption of Sensitive Data",
            "The product does not encrypt sensitive or critical information "
            "before storage or transmission."},
    CweInfo{319, "Cleartext Transmission of Sensitive Information",
            "The product transmits sensitive or security-critical data in "
            "cleartext in a communication channel that can be sniffed by "
            "unauthorized actors."},
    CweInfo{327, "Use of a Broken or Risky Cryptographic Algorithm",
            "The product uses a broken or risky cryptographic algorithm or "
            "protocol."},
    CweInfo{328, "Use of Weak Hash",
            "The product uses an algorithm that produces a digest (hash) "
            "that does not meet security expectations regarding collision "
            "and preimage resistance."},
    CweInfo{330, "Use of Insufficiently Random Values",
            "The product uses insufficiently random numbers or values in a "
            "security context that depends on unpredictable numbers."},
    CweInfo{338, "Use of Cryptographically Weak Pseudo-Random Number "
                 "Generator (PRNG)",
            "The product uses a Pseudo-Random Number Generator (PRNG) in a "
            "security context, but the PRNG's algorithm is not "
            "cryptographically strong."},
    CweInfo{347, "Improper Verification of Cryptographic Signature",
            "The product does not verify, or incorrectly verifies, the "
            "cryptographic signature for data."},
    CweInfo{367, "Time-of-check Time-of-use (TOCTOU) Race Condition",
            "The product checks the state of a resource before using that "
            "resource, but the resource's state can change between the check "
            "and the use."},
    CweInfo{377, "Insecure Temporary File",
            "Creating and using insecure temporary files can leave "
            "application and system data vulnerable to attack."},
    CweInfo{401, "Missing Release of Memory after Effective Lifetime",
            "The product does not sufficiently track and release allocated "
            "memory after it has been used, which slowly consumes remaining "
            "memory."},
    CweInfo{415, "Double Free",
            "The product calls free() twice on the same memory address, "
            "potentially leading to modification of unexpected memory "
            "locations."},
    CweInfo{416, "Use After Free",
            "The product reuses or references memory after it has been freed, "
            "which can cause the program to crash or execute arbitrary "
            "code."},
    CweInfo{476, "NULL Pointer Dereference",
            "The product dereferences a pointer that it expects to be valid "
            "but is NULL."},
    CweInfo{522, "Insufficiently Protected Credentials",
            "The product transmits or stores authentication credentials, but "
            "it uses an insecure method that is susceptible to unauthorized "
            "interception and/or retrieval."},
    CweInfo{732, "Incorrect Permission Assignment for Critical Resource",
            "The product specifies permissions for a security-critical "
            "resource in a way that allows that resource to be read or "
            "modified by unintended actors."},
    CweInfo{754, "Improper Check for Unusual or Exceptional Conditions",
            "The product does not check or incorrectly checks for unusual or "
            "exceptional conditions that are not expected to occur frequently "
            "during day-to-day operation."},
    CweInfo{787, "Out-of-bounds Write",
            "The product writes data past the end, or before the beginning, "
            "of the intended buffer."},
    CweInfo{798, "Use of Hard-coded Credentials",
            "The product contains hard-coded credentials, such as a password "
            "or cryptographic key."},
    CweInfo{918, "Server-Side Request Forgery (SSRF)",
            "The web server receives a URL or similar request from an "
            "upstream component and retrieves the contents of this URL, but "
            "it does not sufficiently ensure that the request is being sent "
            "to the expected destination."},
};

}  // namespace

std::optional<CweInfo> find_cwe(CweId id) {
    for (const CweInfo& info : kCatalog) {
        if (info.number == id.number) return info;
    }
    return std::nullopt;
}

std::string cwe_with_description(CweId id) {
    auto info = find_cwe(id);
    if (!info) return id.str();
    std::string out = id.str();
    out += " (";
    out += info->name;
    out += "): ";
    out += info->description;
    return out;
}

}  // namespace scg
