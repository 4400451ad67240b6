#pragma once

/* JSON round-trip for the library's value types and one-way emission of the
 * report types.  Emission is deterministic: object keys keep a fixed order,
 * arrays follow the library's canonical enumerations, and every q-power
 * quantity is an exact rational -- a LogNorm serializes as
 * {"qExponent": {"num","den"}} with value q^{num/den}, or {"qExponent": null}
 * for an exact zero.  Parsers throw parse_error on malformed documents;
 * semantic violations surface through the library constructors.
 */

#include "padic/chars.hpp"
#include "padic/criteria.hpp"
#include "padic/dist.hpp"
#include "padic/field.hpp"
#include "padic/funcspace.hpp"
#include "padic/induction.hpp"
#include "padic/two_chart.hpp"

#include <string>

namespace padic {

// value types: emit and parse
std::string to_json(const FieldPtr& K);            // {"p","f","prec"}
std::string to_json(const Elem& x);                // {"w","digits","prec"}
std::string to_json(const Character& chi);         // {"lambda","algExp","smooth","J"}
std::string to_json(const LocallyPolyFunction& f); // {"level","J","degBound","pieces"}
std::string to_json(const MomentTable& mu);        // {"field","Nmax","Mmax","values"}
std::string to_json(const InductionDatum& dat);    // {"field","J","d","chi1","chi2"}
std::string to_json(const TwoChartDistribution& mu); // {"mu1","mu2"}

FieldPtr field_from_json(const std::string& text);
Elem elem_from_json(const FieldPtr& K, const std::string& text);
Character character_from_json(const FieldPtr& K, const std::string& text);
LocallyPolyFunction function_from_json(const FieldPtr& K, const std::string& text);
MomentTable moment_table_from_json(const std::string& text);
InductionDatum datum_from_json(const std::string& text);
TwoChartDistribution two_chart_from_json(const std::string& text);
// {"field","alpha","alphaTilde","k","J1","J2"}
TemplateParams template_from_json(const std::string& text);

// scalar and report types: emit only
std::string to_json(const Rational& t);
std::string to_json(const LogNorm& v);
std::string to_json(const AvvReport& rep);
std::string to_json(const ConditionReport& rep);
std::string to_json(const EquivalenceRecord& rec);
std::string to_json(const DatumAnalysis& an);
std::string to_json(const TemplateAnalysis& an);
std::string to_json(const CollapseCertificate& cert);

} // namespace padic
