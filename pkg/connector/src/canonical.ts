/**
 * Canonical JSON, implemented independently of any other codebase on
 * purpose: byte-level agreement between this encoder and a foreign one is
 * what the cross-language parity tests certify.
 *
 * Rules: object keys sorted, no insignificant whitespace, integral numbers
 * without a fractional part, non-integral numbers as shortest round-trip
 * decimal, strings minimally escaped. NaN and infinities are rejected.
 */

export type JsonValue =
  | null
  | boolean
  | number
  | string
  | JsonValue[]
  | { [key: string]: JsonValue };

const MAX_SAFE = 2 ** 53;

function encodeNumber(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`value has no canonical form: ${value}`);
  }
  if (Number.isInteger(value) && Math.abs(value) < MAX_SAFE) {
    // String(-0) is "0", matching the integral rule.
    return String(value);
  }
  return String(value);
}

export function canonicalJson(value: JsonValue): string {
  if (value === null) return "null";
  switch (typeof value) {
    case "boolean":
      return value ? "true" : "false";
    case "number":
      return encodeNumber(value);
    case "string":
      return JSON.stringify(value);
    case "object":
      break;
    default:
      throw new Error(`value has no canonical form: ${typeof value}`);
  }
  if (Array.isArray(value)) {
    return `[${value.map((item) => canonicalJson(item)).join(",")}]`;
  }
  const keys = Object.keys(value).sort();
  const parts = keys.map(
    (key) => `${JSON.stringify(key)}:${canonicalJson(value[key])}`
  );
  return `{${parts.join(",")}}`;
}

export function parseJson(text: string): JsonValue {
  return JSON.parse(text) as JsonValue;
}
