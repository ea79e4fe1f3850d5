package compiler;

public class Lexer {
    public String lex(String input) {
        return input;
    }
}
