package io;

public class Scanner {
    public int getA() {
        return 0;
    }

    public int getB() {
        return 1;
    }

    public int getC() {
        return 2;
    }

    public int getD() {
        return 3;
    }

    public int getE() {
        return 4;
    }

    public int getF() {
        return 5;
    }

    public int getG() {
        return 6;
    }

    public int getH() {
        return 7;
    }

    public int getI() {
        return 8;
    }

    public int getJ() {
        return 9;
    }

    public int getK() {
        return 10;
    }

    public int getL() {
        return 11;
    }

    public int getM() {
        return 12;
    }

    public int getN() {
        return 13;
    }

    public int getO() {
        return 14;
    }

    public int getP() {
        return 15;
    }

    public int getQ() {
        return 16;
    }

    public int getR() {
        return 17;
    }

    public int getS() {
        return 18;
    }

    public int getT() {
        return 19;
    }

    public int getU() {
        return 20;
    }

    public int getV() {
        return 21;
    }
}
