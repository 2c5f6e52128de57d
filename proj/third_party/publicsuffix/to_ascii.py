#!/usr/bin/env python3
"""Rewrite public_suffix_list.dat with IDNA (punycode) labels, dropping comments.

usage: to_ascii.py public_suffix_list.dat > public_suffix_list.ascii.dat
"""
import sys


def to_ascii(rule):
    prefix = ""
    if rule.startswith("!"):
        prefix, rule = "!", rule[1:]
    labels = []
    for label in rule.split("."):
        if label == "*" or label.isascii():
            labels.append(label.lower())
        else:
            labels.append("xn--" + label.lower().encode("punycode").decode("ascii"))
    return prefix + ".".join(labels)


def main():
    with open(sys.argv[1], encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("//"):
                continue
            print(to_ascii(line.split()[0]))


if __name__ == "__main__":
    main()
