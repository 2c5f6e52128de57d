class Edge {
  static async *gen() {}
  static async method() {}
  get
  spaced() { return 'getter split over lines'; }
  'string method'() {}
  123() {}
  [Symbol.toPrimitive]() { return 0; }
  async
  notAsync() {}
}
