import assert from "node:assert/strict";
import test from "node:test";
import { canonicalJson, parseJson } from "../src/canonical.js";

test("object keys are sorted with no whitespace", () => {
  assert.equal(canonicalJson({ b: 1, a: 2 }), '{"a":2,"b":1}');
});

test("integral numbers have no fractional part", () => {
  assert.equal(canonicalJson(1), "1");
  assert.equal(canonicalJson(-3), "-3");
  assert.equal(canonicalJson({ reward: 1.0 }), '{"reward":1}');
  assert.equal(canonicalJson(-0), "0");
});

test("non-integral numbers keep shortest round-trip form", () => {
  assert.equal(canonicalJson(0.1), "0.1");
  assert.equal(canonicalJson(2.5), "2.5");
});

test("nested structures", () => {
  const doc = { z: [1, { y: null, x: [true, false] }], a: "s" };
  assert.equal(canonicalJson(doc), '{"a":"s","z":[1,{"x":[true,false],"y":null}]}');
});

test("strings escape minimally", () => {
  assert.equal(canonicalJson("héllo"), '"héllo"');
  assert.equal(canonicalJson("tab\there"), '"tab\\there"');
  assert.equal(canonicalJson(""), '"\\u0001"');
});

test("non-finite numbers are rejected", () => {
  assert.throws(() => canonicalJson(Number.NaN));
  assert.throws(() => canonicalJson(Number.POSITIVE_INFINITY));
});

test("encode-decode-encode is stable", () => {
  const doc = { steps: [{ action: { args: { direction: "east" }, name: "move" } }], n: 1 };
  const once = canonicalJson(doc);
  assert.equal(canonicalJson(parseJson(once)), once);
});
