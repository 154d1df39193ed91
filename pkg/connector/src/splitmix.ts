/**
 * splitmix64 over BigInt. Must match the serving side bit-for-bit: the
 * vault secret is recomputed from the seed here and submitted verbatim.
 */

const MASK64 = (1n << 64n) - 1n;
const GAMMA = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;

export class Splitmix64 {
  private state: bigint;

  constructor(seed: bigint | number) {
    this.state = BigInt(seed) & MASK64;
  }

  next(): bigint {
    this.state = (this.state + GAMMA) & MASK64;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * MIX1) & MASK64;
    z = ((z ^ (z >> 27n)) * MIX2) & MASK64;
    return (z ^ (z >> 31n)) & MASK64;
  }

  nextBelow(bound: number): number {
    if (bound <= 0) throw new Error("bound must be positive");
    return Number(this.next() % BigInt(bound));
  }
}

export function secretHex(seed: number): string {
  return new Splitmix64(seed).next().toString(16).padStart(16, "0");
}
