class Animal {
  constructor(name) {
    this.name = name;
  }
  speak() {
    return `${this.name} makes a sound`;
  }
  get upper() {
    return this.name.toUpperCase();
  }
  set upper(v) {
    this.name = v.toLowerCase();
  }
  static create(name) {
    return new Animal(name);
  }
}

class Dog extends Animal {
  constructor(name) {
    super(name);
    this.tricks = [];
  }
  speak() {
    return super.speak() + ' (woof)';
  }
  *[Symbol.iterator]() {
    yield* this.tricks;
  }
  async fetchBall() {
    await null;
    return 'ball';
  }
}

const d = new Dog('rex');
d.speak();
