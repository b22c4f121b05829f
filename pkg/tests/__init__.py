"""Tests module."""



